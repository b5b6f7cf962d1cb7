#include "copula_lab/harness.hpp"

#include "copula_lab/error.hpp"
#include "copula_lab/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace copula_lab {

namespace {

using Json = nlohmann::ordered_json;

// Output-only annotations that may follow the config block.
constexpr std::string_view annotation_keys[] = { "ties", "raw_min", "raw_max" };

std::string format_g12(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Shortest text that parses back to the same double.
std::string format_exact(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_integer(std::string_view key, std::string_view text)
{
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ParseError("invalid integer for '" + std::string(key) + "': '" + std::string(text) + "'", 0);
  return value;
}

double parse_real(std::string_view key, std::string_view text)
{
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
      !std::isfinite(value))
    throw ParseError("invalid number for '" + std::string(key) + "': '" + std::string(text) + "'", 0);
  return value;
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text)
{
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string comment_block(const RunConfig& config)
{
  std::string out;
  std::istringstream lines(serialize_config(config));
  for (std::string line; std::getline(lines, line);)
    out += "# " + line + "\n";
  return out;
}

Json config_json(const RunConfig& config)
{
  Json j = Json::object();
  std::istringstream lines(serialize_config(config));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

double require(const std::optional<double>& value, const char* flag)
{
  if (!value)
    throw std::invalid_argument(std::string("missing ") + flag);
  return *value;
}

constexpr double default_single_bandwidth = 0.05;

std::string read_text(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
    throw IoError("cannot read '" + path + "'");
  return ss.str();
}

} // namespace

std::string_view command_name(Command command)
{
  switch (command) {
    case Command::Estimate:
      return "estimate";
    case Command::Simulate:
      return "simulate";
    case Command::Bands:
      return "bands";
    case Command::Verify:
      return "verify";
  }
  throw std::logic_error("unknown command");
}

Command command_from_name(std::string_view name)
{
  for (Command c : { Command::Estimate, Command::Simulate, Command::Bands, Command::Verify })
    if (command_name(c) == name)
      return c;
  throw std::invalid_argument("unknown command '" + std::string(name) + "'");
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value)
{
  try {
    if (key == "command")
      config.command = command_from_name(value);
    else if (key == "copula")
      config.copula = value;
    else if (key == "theta")
      config.theta = parse_real(key, value);
    else if (key == "rho")
      config.rho = parse_real(key, value);
    else if (key == "estimator")
      config.estimator = value;
    else if (key == "phi")
      config.phi = value;
    else if (key == "kernel")
      config.kernel = value;
    else if (key == "n")
      config.n = parse_integer<std::size_t>(key, value);
    else if (key == "reps")
      config.reps = parse_integer<std::size_t>(key, value);
    else if (key == "h")
      config.h = parse_real(key, value);
    else if (key == "c")
      config.c = parse_real(key, value);
    else if (key == "bn") {
      if (value != "invlog")
        parse_real(key, value);
      config.bn = value;
    } else if (key == "grid-h")
      config.grid_h = parse_integer<std::size_t>(key, value);
    else if (key == "grid-uv")
      config.grid_uv = parse_integer<std::size_t>(key, value);
    else if (key == "epsilon")
      config.epsilon = parse_real(key, value);
    else if (key == "seed")
      config.seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "b1")
      config.b1 = parse_real(key, value);
    else if (key == "b2")
      config.b2 = parse_real(key, value);
    else if (key == "probes")
      config.probes = parse_integer<std::size_t>(key, value);
    else if (key == "draws")
      config.draws = parse_integer<std::size_t>(key, value);
    else if (key == "input")
      config.input = value;
    else if (key == "out")
      config.out = value;
    else
      throw ParseError("unknown key '" + std::string(key) + "'", 0);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

std::string serialize_config(const RunConfig& config)
{
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out.append(key).append("=").append(value).append("\n");
  };
  auto put_opt = [&](std::string_view key, const std::optional<double>& value) {
    if (value)
      put(key, format_exact(*value));
  };
  put("command", std::string(command_name(config.command)));
  put("copula", config.copula);
  put_opt("theta", config.theta);
  put_opt("rho", config.rho);
  put("estimator", config.estimator);
  put("phi", config.phi);
  put("kernel", config.kernel);
  put("n", std::to_string(config.n));
  put("reps", std::to_string(config.reps));
  put_opt("h", config.h);
  put("c", format_exact(config.c));
  put("bn", config.bn);
  put("grid-h", std::to_string(config.grid_h));
  put("grid-uv", std::to_string(config.grid_uv));
  put("epsilon", format_exact(config.epsilon));
  put("seed", std::to_string(config.seed));
  put_opt("b1", config.b1);
  put_opt("b2", config.b2);
  put("probes", std::to_string(config.probes));
  put("draws", std::to_string(config.draws));
  if (!config.input.empty())
    put("input", config.input);
  if (!config.out.empty())
    put("out", config.out);
  return out;
}

RunConfig parse_config(std::string_view text)
{
  RunConfig config;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.starts_with("# "))
      line.remove_prefix(2);
    else if (line.starts_with("#"))
      line.remove_prefix(1);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      break;
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (std::find(std::begin(annotation_keys), std::end(annotation_keys), key) !=
        std::end(annotation_keys))
      continue;
    try {
      set_config_value(config, key, value);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), i + 1);
    }
  }
  return config;
}

void validate_config(const RunConfig& config)
{
  kernel_from_name(config.kernel);
  transformation_from_name(config.phi);
  config_estimator(config);
  config_copula(config);
  if (config.n < 2)
    throw std::invalid_argument("n must be at least 2");
  if (config.reps < 2)
    throw std::invalid_argument("reps must be at least 2");
  if (config.grid_h < 2)
    throw std::invalid_argument("grid-h must be at least 2");
  if (config.grid_uv < 1)
    throw std::invalid_argument("grid-uv must be at least 1");
  if (!(config.c > 0.0))
    throw std::invalid_argument("c must be positive");
  if (config.bn != "invlog") {
    const double bn = parse_real("bn", config.bn);
    if (!(bn > 0.0 && bn < 1.0))
      throw std::invalid_argument("bn must lie in (0,1)");
  }
  if (!(config.epsilon >= 0.0 && config.epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie in [0,1)");
  if (config.h && !(*config.h > 0.0 && *config.h < 1.0))
    throw std::invalid_argument("bandwidth out of range");
  for (const auto& b : { config.b1, config.b2 })
    if (b && !(*b > 0.0 && *b < 1.0))
      throw std::invalid_argument("marginal bandwidth must lie in (0,1)");
  if (config.probes < 1)
    throw std::invalid_argument("probes must be at least 1");
  if (config.draws < 10000)
    throw std::invalid_argument("draws must be at least 10000");
  if (config.out.empty())
    throw std::invalid_argument("missing --out");
  const bool needs_input =
    config.command == Command::Estimate || config.command == Command::Bands;
  if (needs_input && config.input.empty())
    throw std::invalid_argument("missing --input");
  if (config.command == Command::Simulate) {
    if (config.n < 16)
      throw std::invalid_argument("simulate needs n >= 16");
    config_bandwidth_grid(config);
  }
  if (config.command == Command::Verify &&
      !(config.h.value_or(default_single_bandwidth) <= 0.25))
    throw std::invalid_argument("verify bandwidth must lie in (0, 0.25]");
}

CopulaModel config_copula(const RunConfig& config)
{
  if (config.copula == "independence")
    return CopulaModel::independence();
  if (config.copula == "clayton")
    return CopulaModel::clayton(require(config.theta, "--theta"));
  if (config.copula == "fgm")
    return CopulaModel::fgm(require(config.theta, "--theta"));
  if (config.copula == "gaussian")
    return CopulaModel::gaussian(require(config.rho, "--rho"));
  throw std::invalid_argument("unknown copula '" + config.copula + "'");
}

EstimatorKind config_estimator(const RunConfig& config)
{
  EstimatorKind kind = estimator_from_code(config.estimator, transformation_from_name(config.phi));
  if (auto* ll = std::get_if<LocalLinearEstimator>(&kind)) {
    ll->b1 = config.b1;
    ll->b2 = config.b2;
  }
  return kind;
}

BandwidthGrid config_bandwidth_grid(const RunConfig& config)
{
  const BandwidthRule rule = config.bn == "invlog"
                               ? BandwidthRule::inv_log()
                               : BandwidthRule::fixed_value(parse_real("bn", config.bn));
  return bandwidth_grid(config.n, config.c, rule, config.grid_h);
}

PairedSample parse_sample_csv(std::string_view text)
{
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != "x,y")
    throw ParseError("expected header 'x,y'", 1);
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) {
      // a trailing newline leaves one empty line at the end
      if (i + 1 == lines.size())
        break;
      throw ParseError("empty row", i + 1);
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("expected two comma-separated fields", i + 1);
    try {
      xs.push_back(parse_real("x", trim(line.substr(0, comma))));
      ys.push_back(parse_real("y", trim(line.substr(comma + 1))));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), i + 1);
    }
  }
  if (xs.size() < 2)
    throw std::invalid_argument("sample needs at least 2 rows");
  return PairedSample(std::move(xs), std::move(ys));
}

PairedSample read_sample_csv(const std::string& path)
{
  return parse_sample_csv(read_text(path));
}

std::size_t thread_cap()
{
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COPULA_LAB_THREADS")) {
    std::size_t requested = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), requested);
    if (ec == std::errc() && ptr == text.data() + text.size() && requested > 0)
      cap = std::min(cap, requested);
  }
  return cap;
}

namespace {

// Runs body(r) for r in [0, count) on up to `threads` workers; the first
// exception is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body body)
{
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t r = 0; r < count; ++r)
      body(r);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= count)
        return;
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back(worker);
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace

SimulationResult simulate(const SimulationSetup& setup)
{
  if (setup.reps < 2)
    throw std::invalid_argument("simulation needs at least 2 replicates");
  if (setup.n < 16)
    throw std::invalid_argument("R_n undefined below n=16");
  const std::size_t bandwidths = setup.grid.points.size();
  const auto& lattice = setup.uv_points;

  // surfaces[r][k]: replicate r at bandwidth k
  std::vector<std::vector<SurfaceGrid>> surfaces(setup.reps);
  std::vector<SurfaceGrid> tilde(setup.reps);
  parallel_for(setup.reps, thread_cap(), [&](std::size_t r) {
    Rng rng(setup.seed, r);
    UniformPairs pairs = copula_sample(setup.model, setup.n, rng);
    tilde[r] = uniform_empirical_process(pairs.us, pairs.vs, setup.model, lattice, lattice);
    const PairedSample sample(std::move(pairs.us), std::move(pairs.vs));
    const PseudoObservations pseudo = estimator_pseudo(setup.kind, setup.spec, sample);
    surfaces[r].reserve(bandwidths);
    for (double h : setup.grid.points)
      surfaces[r].push_back(estimate_on_grid(setup.kind, setup.spec, pseudo, h, lattice, lattice));
  });

  for (std::size_t k = 0; k < bandwidths; ++k) {
    std::vector<SurfaceGrid> column(setup.reps);
    for (std::size_t r = 0; r < setup.reps; ++r)
      column[r] = std::move(surfaces[r][k]);
    const SurfaceGrid mean = mean_surface(column);
    std::vector<SurfaceGrid> dev = deviation_field(column, mean);
    for (std::size_t r = 0; r < setup.reps; ++r)
      surfaces[r][k] = std::move(dev[r]);
  }

  SimulationResult result;
  result.report = lil_statistic(surfaces, setup.grid.points, setup.n, tilde);
  result.corollary2.reserve(setup.reps);
  for (std::size_t r = 0; r < setup.reps; ++r)
    result.corollary2.push_back(corollary2_statistic(surfaces[r], tilde[r], setup.grid, setup.n));
  result.discretization_bound =
    sup_discretization_bound(setup.kind, setup.spec, lattice, lattice, setup.grid.lower());
  return result;
}

SimulationSetup simulation_setup(const RunConfig& config)
{
  SimulationSetup setup;
  setup.model = config_copula(config);
  setup.kind = config_estimator(config);
  setup.spec = kernel_from_name(config.kernel);
  setup.n = config.n;
  setup.reps = config.reps;
  setup.grid = config_bandwidth_grid(config);
  setup.uv_points = interior_lattice(config.grid_uv);
  setup.seed = config.seed;
  return setup;
}

std::string render_estimate(const RunConfig& config, const PairedSample& sample)
{
  const double h = config.h.value_or(default_single_bandwidth);
  const KernelSpec spec = kernel_from_name(config.kernel);
  const auto lattice = interior_lattice(config.grid_uv);
  const SurfaceGrid surface =
    estimate_on_grid(config_estimator(config), spec, sample, h, lattice, lattice);
  std::string out = comment_block(config);
  out += std::string("# ties=") + (sample.has_ties() ? "true" : "false") + "\n";
  out += "u,v,estimate\n";
  for (std::size_t i = 0; i < surface.rows(); ++i)
    for (std::size_t j = 0; j < surface.cols(); ++j)
      out += format_g12(surface.u_points[i]) + "," + format_g12(surface.v_points[j]) + "," +
             format_g12(surface.at(i, j)) + "\n";
  return out;
}

std::string render_bands(const RunConfig& config, const PairedSample& sample)
{
  const double h = config.h.value_or(default_single_bandwidth);
  if (!(h < 0.5))
    throw std::invalid_argument("band region violates boundary restriction");
  const KernelSpec spec = kernel_from_name(config.kernel);
  const EstimatorKind kind = config_estimator(config);
  const auto lattice = span_lattice(config.grid_uv, h, 1.0 - h);
  SurfaceGrid surface = estimate_on_grid(kind, spec, sample, h, lattice, lattice);
  const auto [lo, hi] = std::minmax_element(surface.values.begin(), surface.values.end());
  const double raw_min = *lo;
  const double raw_max = *hi;
  const bool clamp = std::holds_alternative<LocalLinearEstimator>(kind);
  if (clamp)
    for (double& x : surface.values)
      x = std::clamp(x, 0.0, 1.0);
  const ConfidenceBand band = confidence_band(surface, sample.size(), h, config.epsilon);
  std::string out = comment_block(config);
  out += std::string("# ties=") + (sample.has_ties() ? "true" : "false") + "\n";
  if (clamp)
    out += "# raw_min=" + format_g12(raw_min) + "\n# raw_max=" + format_g12(raw_max) + "\n";
  out += "u,v,lower,center,upper\n";
  const std::size_t cols = band.v_points.size();
  for (std::size_t i = 0; i < band.u_points.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t c = i * cols + j;
      out += format_g12(band.u_points[i]) + "," + format_g12(band.v_points[j]) + "," +
             format_g12(band.lower[c]) + "," + format_g12(band.center[c]) + "," +
             format_g12(band.upper[c]) + "\n";
    }
  return out;
}

std::string render_report_csv(const RunConfig& config, const SimulationResult& result)
{
  std::string out = comment_block(config);
  out += "estimator,n,M,h,replicate,sup_abs_dev,prop1_stat\n";
  const auto& report = result.report;
  const std::string prefix = config.estimator + "," + std::to_string(report.n) + "," +
                             std::to_string(report.replications) + ",";
  for (const auto& rec : report.records)
    out += prefix + format_g12(rec.h) + "," + std::to_string(rec.replicate) + "," +
           format_g12(rec.sup_abs_deviation) + "," + format_g12(rec.prop1_statistic) + "\n";
  return out;
}

std::string render_summary_json(const RunConfig& config,
                                const SimulationSetup& setup,
                                const SimulationResult& result)
{
  const auto& report = result.report;
  Json j;
  j["estimator"] = config.estimator;
  j["n"] = report.n;
  j["M"] = report.replications;
  j["rn"] = report.rn;
  j["lil_statistic_quantiles"] = report.lil_quantiles;
  j["exceed_fraction"] = report.exceed_fraction;
  j["threshold"] = report.threshold;
  j["grid"] = { { "c", setup.grid.c },
                { "bn", setup.grid.bn },
                { "count", setup.grid.points.size() },
                { "theorem_conforming", setup.grid.theorem_conforming },
                { "points", setup.grid.points } };
  j["seed"] = config.seed;
  double prop1_max = 0.0;
  for (const auto& rec : report.records)
    prop1_max = std::max(prop1_max, rec.prop1_statistic);
  j["prop1_max"] = prop1_max;
  double c2 = 0.0;
  for (double x : result.corollary2)
    c2 += x;
  j["corollary2_mean"] = c2 / static_cast<double>(result.corollary2.size());
  if (result.discretization_bound)
    j["discretization_bound"] = *result.discretization_bound;
  else
    j["discretization_bound"] = nullptr;
  j["uv_lattice"] = setup.uv_points.size();
  j["config"] = config_json(config);
  return j.dump(2) + "\n";
}

std::string render_verify_json(const RunConfig& config)
{
  const KernelSpec spec = kernel_from_name(config.kernel);
  const Transformation phi = transformation_from_name(config.phi);
  const CopulaModel model = config_copula(config);
  const double h = config.h.value_or(default_single_bandwidth);
  const GiResult gi = verify_gi(spec, phi, config.probes, mix_seed(config.seed, 0));
  const GiiResult gii = verify_gii(spec, phi, model, h, config.draws, mix_seed(config.seed, 1));
  Json j;
  j["gi"] = { { "kappa", gi.kappa },
              { "max_abs_g", gi.max_abs_g },
              { "probes", gi.probes },
              { "pass", gi.pass } };
  j["gii"] = { { "c0", gii.c0 },
               { "h", gii.h },
               { "c0_times_h", gii.c0_times_h },
               { "estimate", gii.max_estimate },
               { "standard_error", gii.standard_error },
               { "probe", { gii.probe_u, gii.probe_v } },
               { "pass", gii.pass } };
  j["config"] = config_json(config);
  return j.dump(2) + "\n";
}

std::string summary_path(const std::string& out)
{
  return out + ".summary.json";
}

void write_file_atomic(const std::string& path, std::string_view contents)
{
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot open '" + tmp + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("cannot write '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

void run_estimate(const RunConfig& config)
{
  const PairedSample sample = read_sample_csv(config.input);
  write_file_atomic(config.out, render_estimate(config, sample));
}

void run_simulate(const RunConfig& config)
{
  const SimulationSetup setup = simulation_setup(config);
  const SimulationResult result = simulate(setup);
  const std::string report = render_report_csv(config, result);
  const std::string summary = render_summary_json(config, setup, result);
  write_file_atomic(config.out, report);
  try {
    write_file_atomic(summary_path(config.out), summary);
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(config.out, ignored);
    throw;
  }
}

void run_bands(const RunConfig& config)
{
  const PairedSample sample = read_sample_csv(config.input);
  write_file_atomic(config.out, render_bands(config, sample));
}

void run_verify(const RunConfig& config)
{
  write_file_atomic(config.out, render_verify_json(config));
}

void run(const RunConfig& config)
{
  validate_config(config);
  switch (config.command) {
    case Command::Estimate:
      return run_estimate(config);
    case Command::Simulate:
      return run_simulate(config);
    case Command::Bands:
      return run_bands(config);
    case Command::Verify:
      return run_verify(config);
  }
}

} // namespace copula_lab
