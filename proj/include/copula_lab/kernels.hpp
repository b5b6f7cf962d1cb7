#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace copula_lab {

enum class KernelFamily
{
  Epanechnikov,
  Quartic,
  Uniform
};

//! Symmetric polynomial kernel supported on [-1,1] with unit mass.
class KernelSpec
{
public:
  constexpr KernelSpec() = default;
  constexpr explicit KernelSpec(KernelFamily family)
    : family_(family)
  {
  }

  constexpr KernelFamily family() const { return family_; }

  //! sup |k| over the support (the mode for these families).
  double sup_norm() const;

  //! integral of t^2 k(t) over [-1,1].
  double second_moment() const;

  std::string_view name() const;

  friend constexpr bool operator==(KernelSpec, KernelSpec) = default;

private:
  KernelFamily family_ = KernelFamily::Epanechnikov;
};

//! Accepts "epanechnikov", "quartic", "uniform"; throws std::invalid_argument.
KernelSpec kernel_from_name(std::string_view name);

double kernel_eval(KernelSpec spec, double t);

//! K(x) = integral of k over [-1, min(x,1)]; exactly 0 for x <= -1 and 1 for
//! x >= 1.
double integrated_kernel(KernelSpec spec, double x);

//! Antiderivative of t^j k(t) that vanishes at 0, valid on [-1,1].
double kernel_moment_antiderivative(KernelSpec spec, int j, double t);

//! a_j(w,h): integral of t^j k(t) over [(w-1)/h, w/h] intersected with the
//! support. When the window covers the whole support the exact constants
//! (1, 0, second moment) are returned.
double boundary_moments(KernelSpec spec, double w, double h, int j);

//! The three moments a_0..a_2 together with the clipped integration window.
struct BoundaryWindow
{
  std::array<double, 3> a{};
  double lower = -1.0; //!< max(-1, (w-1)/h)
  double upper = 1.0;  //!< min(1, w/h)
  bool full_support = true;

  double denominator() const { return a[0] * a[2] - a[1] * a[1]; }
};

//! Throws std::invalid_argument unless 0 < h < 1, and std::domain_error
//! ("degenerate boundary moments") when |a_0 a_2 - a_1^2| < 1e-12.
BoundaryWindow boundary_window(KernelSpec spec, double w, double h);

//! Local-linear kernel k_{w,h}(t).
double local_linear_kernel(KernelSpec spec, double w, double h, double t);
double local_linear_kernel(KernelSpec spec, const BoundaryWindow& window, double t);

//! K_{w,h}(x), the integral of k_{w,h} from -infinity to x. Not monotone in
//! general; exactly 1 for x >= min(1, w/h).
double local_linear_integrated(KernelSpec spec, double w, double h, double x);
double local_linear_integrated(KernelSpec spec,
                               const BoundaryWindow& window,
                               double x);

//! Kernel-smoothed empirical CDF, mean of K((x - data_i)/b).
double smoothed_marginal(KernelSpec spec,
                         std::span<const double> data,
                         double b,
                         double x);

enum class TransformationFamily
{
  Identity,
  Smoothstep
};

enum class TransformMode
{
  Forward,
  Inverse,
  Derivative
};

//! Strictly increasing bijection phi of [0,1] with bounded derivative.
//! Smoothstep is phi(t) = 3t^2 - 2t^3.
class Transformation
{
public:
  constexpr Transformation() = default;
  constexpr explicit Transformation(TransformationFamily family)
    : family_(family)
  {
  }

  constexpr TransformationFamily family() const { return family_; }

  double forward(double t) const;
  double inverse(double y) const;
  double derivative(double t) const;
  double derivative_bound() const;
  std::string_view name() const;

  friend constexpr bool operator==(Transformation, Transformation) = default;

private:
  TransformationFamily family_ = TransformationFamily::Identity;
};

Transformation transformation_from_name(std::string_view name);

//! Checked evaluation; throws std::invalid_argument for t outside [0,1].
double transformation_eval(const Transformation& phi, TransformMode mode, double t);

} // namespace copula_lab
