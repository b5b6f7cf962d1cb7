#pragma once

#include "copula_lab/copulas.hpp"
#include "copula_lab/deviation.hpp"
#include "copula_lab/empirical.hpp"
#include "copula_lab/estimators.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace copula_lab {

enum class Command
{
  Estimate,
  Simulate,
  Bands,
  Verify
};

std::string_view command_name(Command command);
Command command_from_name(std::string_view name);

//! Everything a CLI run depends on. Serialises to `key=value` lines in a
//! fixed key order; unset optional keys are omitted.
struct RunConfig
{
  Command command = Command::Estimate;
  std::string copula = "independence";
  std::optional<double> theta;
  std::optional<double> rho;
  std::string estimator = "t";
  std::string phi = "identity";
  std::string kernel = "epanechnikov";
  std::size_t n = 1000;
  std::size_t reps = 200;
  std::optional<double> h;
  double c = 1.0;
  std::string bn = "invlog";
  std::size_t grid_h = 8;
  std::size_t grid_uv = 33;
  double epsilon = 0.1;
  std::uint64_t seed = 42;
  std::optional<double> b1;
  std::optional<double> b2;
  std::size_t probes = 100000;
  std::size_t draws = 100000;
  std::string input;
  std::string out;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

//! Sets one field from its textual form; keys match the CLI flags without
//! the leading dashes (grid-h, grid-uv, ...). Throws ParseError.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

std::string serialize_config(const RunConfig& config);

//! Reads `key=value` lines; blank lines are skipped and a leading "# " is
//! stripped, so the comment block of any output file parses back. Lines
//! that are not assignments (e.g. the CSV header) end the block.
RunConfig parse_config(std::string_view text);

//! Domain checks shared by all commands; throws std::invalid_argument.
void validate_config(const RunConfig& config);

CopulaModel config_copula(const RunConfig& config);
EstimatorKind config_estimator(const RunConfig& config);
BandwidthGrid config_bandwidth_grid(const RunConfig& config);

//! Parses a `x,y` CSV with LF or CRLF endings. Throws ParseError with the
//! offending line number.
PairedSample parse_sample_csv(std::string_view text);
PairedSample read_sample_csv(const std::string& path);

//! Number of worker threads: hardware concurrency capped by the
//! COPULA_LAB_THREADS environment variable.
std::size_t thread_cap();

struct SimulationSetup
{
  CopulaModel model = CopulaModel::independence();
  EstimatorKind kind = TransformationEstimator{};
  KernelSpec spec{};
  std::size_t n = 2000;
  std::size_t reps = 200;
  BandwidthGrid grid;
  std::vector<double> uv_points;
  std::uint64_t seed = 42;
};

struct SimulationResult
{
  DeviationReport report;
  std::vector<double> corollary2; //!< per replicate
  std::optional<double> discretization_bound;
};

//! Samples `reps` datasets, evaluates the estimator over every bandwidth and
//! the lattice, centres by the cross-replicate mean and reduces in replicate
//! order. Output does not depend on the thread count.
SimulationResult simulate(const SimulationSetup& setup);

//! Renderers return the full file contents; run_* write them atomically.
std::string render_estimate(const RunConfig& config, const PairedSample& sample);
std::string render_bands(const RunConfig& config, const PairedSample& sample);
std::string render_report_csv(const RunConfig& config, const SimulationResult& result);
std::string render_summary_json(const RunConfig& config,
                                const SimulationSetup& setup,
                                const SimulationResult& result);
std::string render_verify_json(const RunConfig& config);

SimulationSetup simulation_setup(const RunConfig& config);

//! Summary JSON of simulate goes next to the report: `<out>.summary.json`.
std::string summary_path(const std::string& out);

void run_estimate(const RunConfig& config);
void run_simulate(const RunConfig& config);
void run_bands(const RunConfig& config);
void run_verify(const RunConfig& config);

//! Validates and dispatches on config.command.
void run(const RunConfig& config);

//! Writes through a temporary sibling and renames; nothing is left behind on
//! failure.
void write_file_atomic(const std::string& path, std::string_view contents);

} // namespace copula_lab
