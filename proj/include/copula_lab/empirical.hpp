#pragma once

#include "copula_lab/kernels.hpp"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace copula_lab {

class CopulaModel;

//! Bivariate sample (X_i, Y_i), n >= 2, all values finite. Order statistics
//! and ranks are computed once at construction.
class PairedSample
{
public:
  PairedSample(std::vector<double> xs, std::vector<double> ys);

  std::size_t size() const { return xs_.size(); }
  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::span<const double> sorted_xs() const { return sorted_xs_; }
  std::span<const double> sorted_ys() const { return sorted_ys_; }

  //! Average ranks (1-based); integral when the coordinate has no ties.
  std::span<const double> x_ranks() const { return x_ranks_; }
  std::span<const double> y_ranks() const { return y_ranks_; }

  bool has_ties() const { return x_ties_ || y_ties_; }
  bool x_has_ties() const { return x_ties_; }
  bool y_has_ties() const { return y_ties_; }

  //! Same observations with the coordinates exchanged.
  PairedSample swapped() const;

private:
  std::vector<double> xs_, ys_;
  std::vector<double> sorted_xs_, sorted_ys_;
  std::vector<double> x_ranks_, y_ranks_;
  bool x_ties_ = false;
  bool y_ties_ = false;
};

struct RescaledRank
{
};

struct SmoothedMarginal
{
  double b1;
  double b2;
};

using PseudoVariant = std::variant<RescaledRank, SmoothedMarginal>;

//! Pseudo-observations (U_i, V_i). Keeps the permutation sorting the first
//! coordinate ascending (stable), which the estimators sum over.
class PseudoObservations
{
public:
  PseudoObservations(std::vector<double> us,
                     std::vector<double> vs,
                     PseudoVariant variant = RescaledRank{},
                     bool ties = false);

  std::size_t size() const { return us_.size(); }
  std::span<const double> us() const { return us_; }
  std::span<const double> vs() const { return vs_; }
  const PseudoVariant& variant() const { return variant_; }
  bool is_rescaled_rank() const
  {
    return std::holds_alternative<RescaledRank>(variant_);
  }
  bool ties() const { return ties_; }
  std::span<const std::size_t> u_order() const { return u_order_; }

  PseudoObservations swapped() const;

private:
  std::vector<double> us_, vs_;
  PseudoVariant variant_;
  bool ties_;
  std::vector<std::size_t> u_order_;
};

//! (1/n) #{data_i <= x}; throws std::invalid_argument("empty sample").
double ecdf_eval(std::span<const double> data, double x);

//! Same as ecdf_eval for data already sorted ascending.
double ecdf_eval_sorted(std::span<const double> sorted, double x);

//! inf{x : F_n(x) >= u}, the ceil(u n)-th order statistic, for u in (0,1].
double generalized_inverse(std::span<const double> data, double u);
double generalized_inverse_sorted(std::span<const double> sorted, double u);

//! Rescaled ranks rank/(n+1) (average ranks under ties).
PseudoObservations pseudo_observations(const PairedSample& sample);

//! Smoothed marginals U_i = F^_n(X_i) with bandwidth b1 (b2 for Y); both in (0,1).
PseudoObservations pseudo_observations(const PairedSample& sample,
                                       KernelSpec kernel,
                                       double b1,
                                       double b2);

//! C_n(u,v) = H_n(F_n^-1(u), G_n^-1(v)); 0 when u or v is 0.
double empirical_copula(const PairedSample& sample, double u, double v);

//! (1/n) #{U_i <= u, V_i <= v}.
double uniform_empirical_cdf(std::span<const double> us,
                             std::span<const double> vs,
                             double u,
                             double v);
double uniform_empirical_cdf(const PseudoObservations& pseudo, double u, double v);

//! sqrt(n) [C_n(u,v) - C(u,v)].
double empirical_copula_process(const PairedSample& sample,
                                const CopulaModel& model,
                                double u,
                                double v);

//! Lattice evaluation of C_n; identical to the pointwise counts.
//! Result is row-major: index i * v_points.size() + j.
std::vector<double> empirical_copula_on_grid(const PairedSample& sample,
                                             std::span<const double> u_points,
                                             std::span<const double> v_points);

std::vector<double> uniform_empirical_cdf_on_grid(std::span<const double> us,
                                                  std::span<const double> vs,
                                                  std::span<const double> u_points,
                                                  std::span<const double> v_points);

} // namespace copula_lab
