#pragma once

#include "copula_lab/copulas.hpp"
#include "copula_lab/estimators.hpp"
#include "copula_lab/kernels.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace copula_lab {

//! R_n = sqrt(n / (2 log log n)); throws std::invalid_argument below n = 16.
double rn(std::size_t n);

//! Upper bandwidth endpoint: 1/log(n) or a fixed value.
struct BandwidthRule
{
  std::optional<double> fixed;

  static BandwidthRule inv_log() { return {}; }
  static BandwidthRule fixed_value(double bn) { return { bn }; }
};

struct BandwidthGrid
{
  std::size_t n = 0;
  double c = 1.0;
  double bn = 0.0;
  std::vector<double> points;
  //! bn >= 1/log(n); grids failing this are allowed but flagged.
  bool theorem_conforming = false;

  double lower() const { return points.front(); }
};

//! Geometric grid of `count` bandwidths from c log(n)/n to bn inclusive.
BandwidthGrid bandwidth_grid(std::size_t n, double c, BandwidthRule rule, std::size_t count);

double sup_abs(const SurfaceGrid& surface);

//! Cell-wise mean; throws on lattice mismatch or an empty input.
SurfaceGrid mean_surface(std::span<const SurfaceGrid> replicates);

//! replicate - mean for every replicate; needs at least two replicates.
std::vector<SurfaceGrid> deviation_field(std::span<const SurfaceGrid> replicates,
                                         const SurfaceGrid& mean);

//! sqrt(n) [C~_n - C] on the lattice from the (true) uniform pairs.
SurfaceGrid uniform_empirical_process(std::span<const double> us,
                                      std::span<const double> vs,
                                      const CopulaModel& model,
                                      std::span<const double> u_points,
                                      std::span<const double> v_points);

//! sup |sqrt(n) D - tilde| / sqrt(h max(|log h|, log log n)).
double prop1_statistic(const SurfaceGrid& deviation,
                       const SurfaceGrid& tilde_process,
                       double h,
                       std::size_t n);

//! sup over h and (u,v) of |sqrt(n) D - tilde| / sqrt(bn log log n).
//! deviations[k] belongs to grid.points[k].
double corollary2_statistic(std::span<const SurfaceGrid> deviations,
                            const SurfaceGrid& tilde_process,
                            const BandwidthGrid& grid,
                            std::size_t n);

struct BandwidthRecord
{
  double h = 0.0;
  std::size_t replicate = 0;
  double sup_abs_deviation = 0.0;
  double prop1_statistic = 0.0;
};

struct DeviationReport
{
  std::size_t n = 0;
  std::size_t replications = 0;
  double rn = 0.0;
  std::vector<BandwidthRecord> records; //!< replicate-major, bandwidth-minor
  std::vector<double> lil_statistics;   //!< one per replicate
  std::array<double, 4> lil_quantiles{}; //!< p50, p90, p95, max
  double threshold = 3.0;
  double exceed_fraction = 0.0;
};

//! deviations[r][k] is replicate r at bandwidth k. When tilde_processes is
//! non-empty (one per replicate) the prop1 column is filled, otherwise 0.
DeviationReport lil_statistic(const std::vector<std::vector<SurfaceGrid>>& deviations,
                              std::span<const double> bandwidths,
                              std::size_t n,
                              std::span<const SurfaceGrid> tilde_processes = {});

//! Linear-interpolation (type 7) sample quantile.
double sample_quantile(std::vector<double> values, double p);

//! Bound on the gap between the lattice sup and the sup over the lattice hull
//! for a deviation surface, from the Lipschitz constant of the estimator in u
//! and v at the smallest bandwidth. Empty for LL, whose kernel changes with
//! the evaluation point.
std::optional<double> sup_discretization_bound(const EstimatorKind& kind,
                                               KernelSpec spec,
                                               std::span<const double> u_points,
                                               std::span<const double> v_points,
                                               double h_min);

struct ConfidenceBand
{
  std::vector<double> u_points;
  std::vector<double> v_points;
  std::vector<double> lower;
  std::vector<double> center;
  std::vector<double> upper;
  double halfwidth = 0.0;
  double epsilon = 0.0;
};

//! center +- 3(1+eps)/R_n clipped to [0,1]; lattice must lie in [h,1-h]^2.
ConfidenceBand confidence_band(const SurfaceGrid& estimate,
                               std::size_t n,
                               double h,
                               double epsilon);

double band_halfwidth(std::size_t n, double epsilon);

struct GiResult
{
  double max_abs_g = 0.0;
  double kappa = 0.0;
  std::size_t probes = 0;
  bool pass = false;
};

//! Envelope check of the class G over random (s,t,h,u,v) and random
//! piecewise-linear monotone maps zeta. kappa = 4 |k|^2 + 1.
GiResult verify_gi(KernelSpec spec,
                   const Transformation& phi,
                   std::size_t probes,
                   std::uint64_t seed);

//! 4 (|C_u| + |C_v|) |phi'| |k|.
double gii_constant(KernelSpec spec, const Transformation& phi, const CopulaModel& model);

struct Eg2Estimate
{
  double mean = 0.0;
  double standard_error = 0.0;
};

//! Monte Carlo E g^2(U,V,h) with identity zeta maps at a single (u,v).
Eg2Estimate estimate_eg2(KernelSpec spec,
                         const Transformation& phi,
                         const CopulaModel& model,
                         double h,
                         double u,
                         double v,
                         std::size_t draws,
                         std::uint64_t seed);

struct GiiResult
{
  double h = 0.0;
  double c0 = 0.0;
  double c0_times_h = 0.0;
  double max_estimate = 0.0;       //!< max over probe points of E g^2
  double standard_error = 0.0;     //!< at the maximising probe
  double probe_u = 0.0, probe_v = 0.0;
  bool pass = false;               //!< every probe within c0 h + 3 se
};

//! Probe points are the 9x9 lattice {0.1, ..., 0.9}^2, all sharing one set
//! of copula draws. Requires draws >= 1e4 and 0 < h <= 0.25.
GiiResult verify_gii(KernelSpec spec,
                     const Transformation& phi,
                     const CopulaModel& model,
                     double h,
                     std::size_t draws,
                     std::uint64_t seed);

//! Ordinary least-squares slope of y on x.
double fitted_slope(std::span<const double> x, std::span<const double> y);

} // namespace copula_lab
