#pragma once

#include "copula_lab/empirical.hpp"
#include "copula_lab/kernels.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace copula_lab {

//! Rank-based kernel smoother after mapping through phi^-1.
struct TransformationEstimator
{
  Transformation phi{};
};

//! Local-linear boundary-corrected kernels on smoothed-marginal
//! pseudo-observations. Unset bandwidths default to n^(-1/3).
struct LocalLinearEstimator
{
  std::optional<double> b1;
  std::optional<double> b2;
};

//! Nine-fold mirror reflection of rank pseudo-observations.
struct MirrorReflectionEstimator
{
};

using EstimatorKind = std::
  variant<TransformationEstimator, LocalLinearEstimator, MirrorReflectionEstimator>;

//! "t", "ll" or "mr".
std::string_view estimator_code(const EstimatorKind& kind);
EstimatorKind estimator_from_code(std::string_view code,
                                  Transformation phi = Transformation{});

double default_marginal_bandwidth(std::size_t n);

//! Values on a (u,v) lattice, row-major in u.
struct SurfaceGrid
{
  std::vector<double> u_points;
  std::vector<double> v_points;
  std::vector<double> values;

  SurfaceGrid() = default;
  SurfaceGrid(std::vector<double> us, std::vector<double> vs);

  std::size_t rows() const { return u_points.size(); }
  std::size_t cols() const { return v_points.size(); }
  double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  bool same_lattice(const SurfaceGrid& other) const;
};

//! m interior points j/(m+1), j = 1..m.
std::vector<double> interior_lattice(std::size_t m);

//! m points evenly spanning [lo, hi]; a single point is the midpoint.
std::vector<double> span_lattice(std::size_t m, double lo, double hi);

//! Product-kernel estimator: mean over i of
//! K((phi^-1(u) - phi^-1(U_i))/h) K((phi^-1(v) - phi^-1(V_i))/h).
//! Requires 0 < h < 1 ("bandwidth out of range") and (u,v) in (0,1)^2.
double general_estimate(KernelSpec spec,
                        const Transformation& phi,
                        const PseudoObservations& pseudo,
                        double h,
                        double u,
                        double v);

//! general_estimate restricted to rescaled-rank pseudo-observations.
double transformation_estimate(KernelSpec spec,
                               const Transformation& phi,
                               const PseudoObservations& pseudo,
                               double h,
                               double u,
                               double v);

//! Mean over i of K_{u,h}((u - U_i)/h) K_{v,h}((v - V_i)/h). Raw values, may
//! leave [0,1] slightly near the corners.
double local_linear_estimate(KernelSpec spec,
                             const PseudoObservations& pseudo,
                             double h,
                             double u,
                             double v);

//! Smooths the marginals with (b1, b2) first.
double local_linear_estimate(KernelSpec spec,
                             const PairedSample& sample,
                             double h,
                             double b1,
                             double b2,
                             double u,
                             double v);

using ReflectedPoints = std::vector<std::pair<double, double>>;

//! Order: (+,+), (-,+), (+,-), (-,-), (+,2-), (-,2-), (2-,+), (2-,-), (2-,2-).
std::array<ReflectedPoints, 9> mirror_reflect_points(const PseudoObservations& pseudo);

//! Z_n(l,u,v) over one reflected copy.
double mr_partial(KernelSpec spec,
                  std::span<const std::pair<double, double>> reflected,
                  double h,
                  double u,
                  double v);

//! Sum over the nine reflections of Z(l,u,v) - Z(l,u,0) - Z(l,0,v) + Z(l,0,0),
//! evaluated through the product factorisation of the reflected set, which is
//! exactly 0 on the axes. (u,v) in [0,1]^2.
double mirror_reflection_estimate(KernelSpec spec,
                                  const PseudoObservations& pseudo,
                                  double h,
                                  double u,
                                  double v);

//! Pseudo-observations the estimator consumes: rescaled ranks for T and MR,
//! smoothed marginals for LL.
PseudoObservations estimator_pseudo(const EstimatorKind& kind,
                                    KernelSpec spec,
                                    const PairedSample& sample);

//! Pointwise dispatch over the estimator kinds.
double estimate(const EstimatorKind& kind,
                KernelSpec spec,
                const PseudoObservations& pseudo,
                double h,
                double u,
                double v);

//! Bit-identical to calling estimate() at every lattice point.
SurfaceGrid estimate_on_grid(const EstimatorKind& kind,
                             KernelSpec spec,
                             const PseudoObservations& pseudo,
                             double h,
                             std::span<const double> u_points,
                             std::span<const double> v_points);

SurfaceGrid estimate_on_grid(const EstimatorKind& kind,
                             KernelSpec spec,
                             const PairedSample& sample,
                             double h,
                             std::span<const double> u_points,
                             std::span<const double> v_points);

} // namespace copula_lab
