#include "copula_lab/deviation.hpp"

#include "copula_lab/empirical.hpp"
#include "copula_lab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace copula_lab {

namespace {

double log_log(std::size_t n)
{
  return std::log(std::log(static_cast<double>(n)));
}

void check_same_lattice(const SurfaceGrid& a, const SurfaceGrid& b)
{
  if (!a.same_lattice(b))
    throw std::invalid_argument("surfaces are defined on different lattices");
}

// Random increasing piecewise-linear bijection of [0,1] through `knots`
// interior points; identity when knots == 0.
class MonotoneMap
{
public:
  MonotoneMap(Rng& rng, std::size_t knots)
  {
    xs_ = { 0.0 };
    ys_ = { 0.0 };
    std::vector<double> a(knots), b(knots);
    for (std::size_t i = 0; i < knots; ++i) {
      a[i] = rng.uniform();
      b[i] = rng.uniform();
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    xs_.insert(xs_.end(), a.begin(), a.end());
    ys_.insert(ys_.end(), b.begin(), b.end());
    xs_.push_back(1.0);
    ys_.push_back(1.0);
  }

  double operator()(double s) const
  {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
    if (it == xs_.begin())
      return ys_.front();
    if (it == xs_.end())
      return ys_.back();
    const std::size_t k = static_cast<std::size_t>(it - xs_.begin());
    const double span = xs_[k] - xs_[k - 1];
    if (span <= 0.0)
      return ys_[k];
    return ys_[k - 1] + (ys_[k] - ys_[k - 1]) * (s - xs_[k - 1]) / span;
  }

private:
  std::vector<double> xs_, ys_;
};

} // namespace

double rn(std::size_t n)
{
  if (n < 16)
    throw std::invalid_argument("R_n undefined below n=16");
  return std::sqrt(static_cast<double>(n) / (2.0 * log_log(n)));
}

BandwidthGrid bandwidth_grid(std::size_t n, double c, BandwidthRule rule, std::size_t count)
{
  if (n < 2)
    throw std::invalid_argument("bandwidth grid needs n >= 2");
  if (!(c > 0.0))
    throw std::invalid_argument("c must be positive");
  if (count < 2)
    throw std::invalid_argument("bandwidth grid needs at least 2 points");
  const double log_n = std::log(static_cast<double>(n));
  BandwidthGrid grid;
  grid.n = n;
  grid.c = c;
  grid.bn = rule.fixed.value_or(1.0 / log_n);
  const double lo = c * log_n / static_cast<double>(n);
  if (!(grid.bn < 1.0 && lo < grid.bn))
    throw std::invalid_argument("bandwidth range empty at this n");
  grid.theorem_conforming = grid.bn * log_n >= 1.0 - 1e-12;
  grid.points.resize(count);
  const double ratio = std::log(grid.bn / lo);
  for (std::size_t k = 0; k < count; ++k)
    grid.points[k] = lo * std::exp(ratio * static_cast<double>(k) / static_cast<double>(count - 1));
  grid.points.front() = lo;
  grid.points.back() = grid.bn;
  return grid;
}

double sup_abs(const SurfaceGrid& surface)
{
  double m = 0.0;
  for (double x : surface.values)
    m = std::max(m, std::abs(x));
  return m;
}

SurfaceGrid mean_surface(std::span<const SurfaceGrid> replicates)
{
  if (replicates.empty())
    throw std::invalid_argument("no replicate surfaces");
  SurfaceGrid mean(replicates[0].u_points, replicates[0].v_points);
  for (const auto& r : replicates) {
    check_same_lattice(mean, r);
    for (std::size_t c = 0; c < r.values.size(); ++c)
      mean.values[c] += r.values[c];
  }
  const double m = static_cast<double>(replicates.size());
  for (double& x : mean.values)
    x /= m;
  return mean;
}

std::vector<SurfaceGrid> deviation_field(std::span<const SurfaceGrid> replicates,
                                         const SurfaceGrid& mean)
{
  if (replicates.size() < 2)
    throw std::invalid_argument("deviation field needs at least 2 replicates");
  std::vector<SurfaceGrid> out;
  out.reserve(replicates.size());
  for (const auto& r : replicates) {
    check_same_lattice(r, mean);
    SurfaceGrid d = r;
    for (std::size_t c = 0; c < d.values.size(); ++c)
      d.values[c] -= mean.values[c];
    out.push_back(std::move(d));
  }
  return out;
}

SurfaceGrid uniform_empirical_process(std::span<const double> us,
                                      std::span<const double> vs,
                                      const CopulaModel& model,
                                      std::span<const double> u_points,
                                      std::span<const double> v_points)
{
  SurfaceGrid out(std::vector<double>(u_points.begin(), u_points.end()),
                  std::vector<double>(v_points.begin(), v_points.end()));
  out.values = uniform_empirical_cdf_on_grid(us, vs, u_points, v_points);
  const double root_n = std::sqrt(static_cast<double>(us.size()));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out.at(i, j) = root_n * (out.at(i, j) - model.cdf(u_points[i], v_points[j]));
  return out;
}

namespace {

double sup_scaled_gap(const SurfaceGrid& deviation, const SurfaceGrid& tilde, std::size_t n)
{
  check_same_lattice(deviation, tilde);
  const double root_n = std::sqrt(static_cast<double>(n));
  double m = 0.0;
  for (std::size_t c = 0; c < deviation.values.size(); ++c)
    m = std::max(m, std::abs(root_n * deviation.values[c] - tilde.values[c]));
  return m;
}

} // namespace

double prop1_statistic(const SurfaceGrid& deviation,
                       const SurfaceGrid& tilde_process,
                       double h,
                       std::size_t n)
{
  if (!(h > 0.0 && h < 1.0))
    throw std::invalid_argument("bandwidth out of range");
  if (n < 16)
    throw std::invalid_argument("R_n undefined below n=16");
  const double normalizer = std::sqrt(h * std::max(std::abs(std::log(h)), log_log(n)));
  return sup_scaled_gap(deviation, tilde_process, n) / normalizer;
}

double corollary2_statistic(std::span<const SurfaceGrid> deviations,
                            const SurfaceGrid& tilde_process,
                            const BandwidthGrid& grid,
                            std::size_t n)
{
  if (deviations.size() != grid.points.size())
    throw std::invalid_argument("one deviation surface per bandwidth expected");
  if (n < 16)
    throw std::invalid_argument("R_n undefined below n=16");
  double m = 0.0;
  for (const auto& d : deviations)
    m = std::max(m, sup_scaled_gap(d, tilde_process, n));
  return m / std::sqrt(grid.bn * log_log(n));
}

double sample_quantile(std::vector<double> values, double p)
{
  if (values.empty())
    throw std::invalid_argument("quantile of an empty sequence");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("quantile level out of range");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

DeviationReport lil_statistic(const std::vector<std::vector<SurfaceGrid>>& deviations,
                              std::span<const double> bandwidths,
                              std::size_t n,
                              std::span<const SurfaceGrid> tilde_processes)
{
  if (deviations.empty())
    throw std::invalid_argument("no replicates");
  if (!tilde_processes.empty() && tilde_processes.size() != deviations.size())
    throw std::invalid_argument("one uniform empirical process per replicate expected");
  DeviationReport report;
  report.n = n;
  report.replications = deviations.size();
  report.rn = rn(n);
  std::size_t exceed = 0;
  for (std::size_t r = 0; r < deviations.size(); ++r) {
    if (deviations[r].size() != bandwidths.size())
      throw std::invalid_argument("one deviation surface per bandwidth expected");
    double sup_h = 0.0;
    for (std::size_t k = 0; k < bandwidths.size(); ++k) {
      BandwidthRecord rec;
      rec.h = bandwidths[k];
      rec.replicate = r;
      rec.sup_abs_deviation = sup_abs(deviations[r][k]);
      if (!tilde_processes.empty())
        rec.prop1_statistic = prop1_statistic(deviations[r][k], tilde_processes[r], rec.h, n);
      sup_h = std::max(sup_h, rec.sup_abs_deviation);
      report.records.push_back(rec);
    }
    const double stat = report.rn * sup_h;
    report.lil_statistics.push_back(stat);
    if (stat > report.threshold)
      ++exceed;
  }
  report.exceed_fraction =
    static_cast<double>(exceed) / static_cast<double>(deviations.size());
  report.lil_quantiles = { sample_quantile(report.lil_statistics, 0.5),
                           sample_quantile(report.lil_statistics, 0.9),
                           sample_quantile(report.lil_statistics, 0.95),
                           sample_quantile(report.lil_statistics, 1.0) };
  return report;
}

std::optional<double> sup_discretization_bound(const EstimatorKind& kind,
                                               KernelSpec spec,
                                               std::span<const double> u_points,
                                               std::span<const double> v_points,
                                               double h_min)
{
  if (std::holds_alternative<LocalLinearEstimator>(kind))
    return std::nullopt;
  if (u_points.size() < 2 || v_points.size() < 2)
    return std::nullopt;
  // Largest half-gap between neighbouring lattice points, measured after
  // phi^-1 for T; inside a cell every point is within that distance of a
  // corner in each coordinate.
  Transformation phi;
  double factor = 1.0;
  if (const auto* t = std::get_if<TransformationEstimator>(&kind)) {
    phi = t->phi;
  } else {
    // MR: u-factor is a sum of three integrated kernels, v-factor bounded by 3
    factor = 9.0;
  }
  auto half_gap = [&](std::span<const double> pts) {
    double g = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k)
      g = std::max(g, phi.inverse(pts[k]) - phi.inverse(pts[k - 1]));
    return 0.5 * g;
  };
  const double lipschitz = factor * spec.sup_norm() / h_min;
  // the deviation surface carries the estimator and its mean
  return 2.0 * lipschitz * (half_gap(u_points) + half_gap(v_points));
}

double band_halfwidth(std::size_t n, double epsilon)
{
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie in [0,1)");
  return 3.0 * (1.0 + epsilon) / rn(n);
}

ConfidenceBand confidence_band(const SurfaceGrid& estimate,
                               std::size_t n,
                               double h,
                               double epsilon)
{
  constexpr double slack = 1e-12;
  auto inside = [&](double x) { return x >= h - slack && x <= 1.0 - h + slack; };
  for (double u : estimate.u_points)
    if (!inside(u))
      throw std::invalid_argument("band region violates boundary restriction");
  for (double v : estimate.v_points)
    if (!inside(v))
      throw std::invalid_argument("band region violates boundary restriction");
  ConfidenceBand band;
  band.u_points = estimate.u_points;
  band.v_points = estimate.v_points;
  band.epsilon = epsilon;
  band.halfwidth = band_halfwidth(n, epsilon);
  band.center = estimate.values;
  band.lower.resize(band.center.size());
  band.upper.resize(band.center.size());
  for (std::size_t c = 0; c < band.center.size(); ++c) {
    band.lower[c] = std::max(band.center[c] - band.halfwidth, 0.0);
    band.upper[c] = std::min(band.center[c] + band.halfwidth, 1.0);
  }
  return band;
}

GiResult verify_gi(KernelSpec spec,
                   const Transformation& phi,
                   std::size_t probes,
                   std::uint64_t seed)
{
  if (probes == 0)
    throw std::invalid_argument("verify_gi needs at least one probe");
  Rng rng(seed);
  GiResult result;
  result.kappa = 4.0 * spec.sup_norm() * spec.sup_norm() + 1.0;
  result.probes = probes;
  for (std::size_t p = 0; p < probes; ++p) {
    // a quarter of the probes use the identity map, the rest 1-8 knots
    const std::size_t knots1 = (p % 4 == 0) ? 0 : 1 + rng.next() % 8;
    const std::size_t knots2 = (p % 4 == 0) ? 0 : 1 + rng.next() % 8;
    const MonotoneMap zeta1(rng, knots1);
    const MonotoneMap zeta2(rng, knots2);
    const double s = rng.uniform();
    const double t = rng.uniform();
    // bandwidths log-uniform over [1e-6, 1) to reach the indicator limit
    const double h = std::exp(std::log(1e-6) * rng.uniform());
    double u = rng.uniform();
    double v = rng.uniform();
    if (p % 3 == 1) {
      // adversarial: evaluation point next to the probed observation
      u = std::clamp(s + (rng.uniform() - 0.5) * h, 0.0, 1.0);
      v = std::clamp(t + (rng.uniform() - 0.5) * h, 0.0, 1.0);
    }
    const double k1 = integrated_kernel(spec, (phi.inverse(u) - phi.inverse(zeta1(s))) / h);
    const double k2 = integrated_kernel(spec, (phi.inverse(v) - phi.inverse(zeta2(t))) / h);
    const double indicator = (s <= u && t <= v) ? 1.0 : 0.0;
    result.max_abs_g = std::max(result.max_abs_g, std::abs(k1 * k2 - indicator));
  }
  result.pass = result.max_abs_g <= result.kappa;
  return result;
}

double gii_constant(KernelSpec spec, const Transformation& phi, const CopulaModel& model)
{
  return 4.0 * (model.partial_u_bound() + model.partial_v_bound()) * phi.derivative_bound() *
         spec.sup_norm();
}

namespace {

struct Eg2Accumulator
{
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double g2)
  {
    sum += g2;
    sum_sq += g2 * g2;
  }

  Eg2Estimate finish(std::size_t draws) const
  {
    const double m = static_cast<double>(draws);
    const double mean = sum / m;
    const double var = std::max(0.0, (sum_sq / m - mean * mean) * m / (m - 1.0));
    return { mean, std::sqrt(var / m) };
  }
};

double g_value(KernelSpec spec,
               const Transformation& phi,
               double h,
               double u_arg,
               double v_arg,
               double u,
               double v,
               double s,
               double t)
{
  const double k = integrated_kernel(spec, (u_arg - phi.inverse(s)) / h) *
                   integrated_kernel(spec, (v_arg - phi.inverse(t)) / h);
  return k - ((s <= u && t <= v) ? 1.0 : 0.0);
}

} // namespace

Eg2Estimate estimate_eg2(KernelSpec spec,
                         const Transformation& phi,
                         const CopulaModel& model,
                         double h,
                         double u,
                         double v,
                         std::size_t draws,
                         std::uint64_t seed)
{
  if (draws < 2)
    throw std::invalid_argument("need at least 2 draws");
  if (!(h > 0.0 && h < 1.0))
    throw std::invalid_argument("bandwidth out of range");
  Rng rng(seed);
  // phi^-1 is only defined on [0,1]; points beyond it map linearly
  auto inv = [&](double x) { return x > 1.0 ? 1.0 + (x - 1.0) : phi.inverse(x); };
  const double u_arg = inv(u);
  const double v_arg = inv(v);
  Eg2Accumulator acc;
  for (std::size_t d = 0; d < draws; ++d) {
    const auto [s, t] = model.draw(rng);
    const double g = g_value(spec, phi, h, u_arg, v_arg, u, v, s, t);
    acc.add(g * g);
  }
  return acc.finish(draws);
}

GiiResult verify_gii(KernelSpec spec,
                     const Transformation& phi,
                     const CopulaModel& model,
                     double h,
                     std::size_t draws,
                     std::uint64_t seed)
{
  if (draws < 10000)
    throw std::invalid_argument("verify_gii needs at least 1e4 draws");
  if (!(h > 0.0 && h <= 0.25))
    throw std::invalid_argument("verify_gii bandwidth must lie in (0, 0.25]");
  GiiResult result;
  result.h = h;
  result.c0 = gii_constant(spec, phi, model);
  result.c0_times_h = result.c0 * h;

  std::vector<double> probes;
  for (int k = 1; k <= 9; ++k)
    probes.push_back(0.1 * k);
  const std::size_t p = probes.size();
  std::vector<double> probe_inv(p);
  for (std::size_t k = 0; k < p; ++k)
    probe_inv[k] = phi.inverse(probes[k]);

  std::vector<Eg2Accumulator> acc(p * p);
  std::vector<double> ku(p), kv(p);
  Rng rng(seed);
  for (std::size_t d = 0; d < draws; ++d) {
    const auto [s, t] = model.draw(rng);
    const double is = phi.inverse(s);
    const double it = phi.inverse(t);
    for (std::size_t k = 0; k < p; ++k) {
      ku[k] = integrated_kernel(spec, (probe_inv[k] - is) / h);
      kv[k] = integrated_kernel(spec, (probe_inv[k] - it) / h);
    }
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) {
        const double ind = (s <= probes[a] && t <= probes[b]) ? 1.0 : 0.0;
        const double g = ku[a] * kv[b] - ind;
        acc[a * p + b].add(g * g);
      }
  }
  result.pass = true;
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) {
      const Eg2Estimate e = acc[a * p + b].finish(draws);
      if (e.mean > result.c0_times_h + 3.0 * e.standard_error)
        result.pass = false;
      if (e.mean >= result.max_estimate) {
        result.max_estimate = e.mean;
        result.standard_error = e.standard_error;
        result.probe_u = probes[a];
        result.probe_v = probes[b];
      }
    }
  return result;
}

double fitted_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope needs at least two paired values");
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("slope undefined for constant x");
  return sxy / sxx;
}

} // namespace copula_lab
