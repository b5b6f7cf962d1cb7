#pragma once

#include "copula_lab/rng.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace copula_lab {

enum class CopulaFamily
{
  Independence,
  Clayton,
  FGM,
  Gaussian
};

enum class PartialWrt
{
  U,
  V
};

//! Parametric copula with closed-form CDF and partial derivatives.
//! Clayton takes theta > 0, FGM theta in [-1,1], Gaussian rho in (-1,1).
class CopulaModel
{
public:
  static CopulaModel independence();
  static CopulaModel clayton(double theta);
  static CopulaModel fgm(double theta);
  static CopulaModel gaussian(double rho);

  //! Builds from a CLI name; parameter is ignored for independence.
  static CopulaModel from_name(std::string_view name, double parameter);

  CopulaFamily family() const { return family_; }
  double parameter() const { return parameter_; }
  std::string_view name() const;

  double cdf(double u, double v) const;
  double partial(PartialWrt wrt, double u, double v) const;

  //! Upper bounds of |C_u| and |C_v| over (0,1)^2. Partial derivatives of a
  //! copula are conditional distribution functions, so 1 is attained.
  double partial_u_bound() const { return 1.0; }
  double partial_v_bound() const { return 1.0; }

  //! One draw by conditional inversion: U uniform, V solves C_u(U,V) = W.
  std::pair<double, double> draw(Rng& rng) const;

private:
  CopulaModel(CopulaFamily family, double parameter);

  CopulaFamily family_;
  double parameter_;
};

double copula_cdf(const CopulaModel& model, double u, double v);
double copula_partial(const CopulaModel& model, PartialWrt wrt, double u, double v);

struct UniformPairs
{
  std::vector<double> us;
  std::vector<double> vs;
};

UniformPairs copula_sample(const CopulaModel& model, std::size_t n, Rng& rng);

//! Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_quantile(double p);

//! P(X <= a, Y <= b) for a standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double a, double b, double rho);

} // namespace copula_lab
