#include "copula_lab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace copula_lab {

namespace {

// Polynomial coefficients of k(t) on [-1,1], lowest degree first.
struct Poly
{
  std::array<double, 5> c{};
  int degree = 0;
};

Poly kernel_poly(KernelFamily family)
{
  switch (family) {
    case KernelFamily::Epanechnikov:
      return { { 0.75, 0.0, -0.75, 0.0, 0.0 }, 2 };
    case KernelFamily::Quartic:
      return { { 15.0 / 16.0, 0.0, -30.0 / 16.0, 0.0, 15.0 / 16.0 }, 4 };
    case KernelFamily::Uniform:
      return { { 0.5, 0.0, 0.0, 0.0, 0.0 }, 0 };
  }
  throw std::logic_error("unknown kernel family");
}

void check_bandwidth(double h)
{
  if (!(h > 0.0 && h < 1.0))
    throw std::invalid_argument("bandwidth out of range");
}

constexpr double degenerate_tolerance = 1e-12;

} // namespace

double KernelSpec::sup_norm() const
{
  return kernel_eval(*this, 0.0);
}

double KernelSpec::second_moment() const
{
  switch (family_) {
    case KernelFamily::Epanechnikov:
      return 0.2;
    case KernelFamily::Quartic:
      return 1.0 / 7.0;
    case KernelFamily::Uniform:
      return 1.0 / 3.0;
  }
  throw std::logic_error("unknown kernel family");
}

std::string_view KernelSpec::name() const
{
  switch (family_) {
    case KernelFamily::Epanechnikov:
      return "epanechnikov";
    case KernelFamily::Quartic:
      return "quartic";
    case KernelFamily::Uniform:
      return "uniform";
  }
  throw std::logic_error("unknown kernel family");
}

KernelSpec kernel_from_name(std::string_view name)
{
  if (name == "epanechnikov")
    return KernelSpec(KernelFamily::Epanechnikov);
  if (name == "quartic")
    return KernelSpec(KernelFamily::Quartic);
  if (name == "uniform")
    return KernelSpec(KernelFamily::Uniform);
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

double kernel_eval(KernelSpec spec, double t)
{
  if (!(std::abs(t) <= 1.0))
    return 0.0;
  const double s = 1.0 - t * t;
  switch (spec.family()) {
    case KernelFamily::Epanechnikov:
      return 0.75 * s;
    case KernelFamily::Quartic:
      return 15.0 / 16.0 * s * s;
    case KernelFamily::Uniform:
      return 0.5;
  }
  throw std::logic_error("unknown kernel family");
}

double integrated_kernel(KernelSpec spec, double x)
{
  if (x <= -1.0)
    return 0.0;
  if (x >= 1.0)
    return 1.0;
  const double x2 = x * x;
  switch (spec.family()) {
    case KernelFamily::Epanechnikov:
      return 0.5 + x * (0.75 - 0.25 * x2);
    case KernelFamily::Quartic:
      return 0.5 + 15.0 / 16.0 * x * (1.0 - x2 * (2.0 / 3.0 - x2 / 5.0));
    case KernelFamily::Uniform:
      return 0.5 * (x + 1.0);
  }
  throw std::logic_error("unknown kernel family");
}

double kernel_moment_antiderivative(KernelSpec spec, int j, double t)
{
  const Poly p = kernel_poly(spec.family());
  double power = t;
  for (int e = 1; e <= j; ++e)
    power *= t;
  // power == t^(j+1)
  double sum = 0.0;
  for (int m = 0; m <= p.degree; ++m) {
    if (p.c[m] != 0.0)
      sum += p.c[m] * power / (m + j + 1);
    power *= t;
  }
  return sum;
}

BoundaryWindow boundary_window(KernelSpec spec, double w, double h)
{
  check_bandwidth(h);
  BoundaryWindow win;
  win.lower = std::max(-1.0, (w - 1.0) / h);
  win.upper = std::min(1.0, w / h);
  win.full_support = win.lower == -1.0 && win.upper == 1.0;
  if (win.full_support) {
    win.a = { 1.0, 0.0, spec.second_moment() };
    return win;
  }
  for (int j = 0; j < 3; ++j) {
    win.a[j] = win.lower < win.upper
                 ? kernel_moment_antiderivative(spec, j, win.upper) -
                     kernel_moment_antiderivative(spec, j, win.lower)
                 : 0.0;
  }
  if (!(std::abs(win.denominator()) >= degenerate_tolerance))
    throw std::domain_error("degenerate boundary moments");
  return win;
}

double boundary_moments(KernelSpec spec, double w, double h, int j)
{
  if (j < 0 || j > 2)
    throw std::invalid_argument("moment order must be 0, 1 or 2");
  check_bandwidth(h);
  const double lower = std::max(-1.0, (w - 1.0) / h);
  const double upper = std::min(1.0, w / h);
  if (lower == -1.0 && upper == 1.0) {
    const std::array<double, 3> full{ 1.0, 0.0, spec.second_moment() };
    return full[j];
  }
  if (!(lower < upper))
    return 0.0;
  return kernel_moment_antiderivative(spec, j, upper) -
         kernel_moment_antiderivative(spec, j, lower);
}

double local_linear_kernel(KernelSpec spec, const BoundaryWindow& win, double t)
{
  if (win.full_support)
    return kernel_eval(spec, t);
  // open window
  if (!(t > win.lower && t < win.upper))
    return 0.0;
  return kernel_eval(spec, t) * (win.a[2] - win.a[1] * t) / win.denominator();
}

double local_linear_kernel(KernelSpec spec, double w, double h, double t)
{
  return local_linear_kernel(spec, boundary_window(spec, w, h), t);
}

double local_linear_integrated(KernelSpec spec, const BoundaryWindow& win, double x)
{
  if (win.full_support)
    return integrated_kernel(spec, x);
  if (x <= win.lower)
    return 0.0;
  if (x >= win.upper)
    return 1.0;
  const double m0 = kernel_moment_antiderivative(spec, 0, x) -
                    kernel_moment_antiderivative(spec, 0, win.lower);
  const double m1 = kernel_moment_antiderivative(spec, 1, x) -
                    kernel_moment_antiderivative(spec, 1, win.lower);
  return (win.a[2] * m0 - win.a[1] * m1) / win.denominator();
}

double local_linear_integrated(KernelSpec spec, double w, double h, double x)
{
  return local_linear_integrated(spec, boundary_window(spec, w, h), x);
}

double smoothed_marginal(KernelSpec spec,
                         std::span<const double> data,
                         double b,
                         double x)
{
  if (data.empty())
    throw std::invalid_argument("empty sample");
  if (!(b > 0.0))
    throw std::invalid_argument("bandwidth out of range");
  double sum = 0.0;
  for (double xi : data)
    sum += integrated_kernel(spec, (x - xi) / b);
  return sum / static_cast<double>(data.size());
}

double Transformation::forward(double t) const
{
  switch (family_) {
    case TransformationFamily::Identity:
      return t;
    case TransformationFamily::Smoothstep:
      return t * t * (3.0 - 2.0 * t);
  }
  throw std::logic_error("unknown transformation");
}

double Transformation::inverse(double y) const
{
  switch (family_) {
    case TransformationFamily::Identity:
      return y;
    case TransformationFamily::Smoothstep: {
      if (y <= 0.0)
        return 0.0;
      if (y >= 1.0)
        return 1.0;
      // Trigonometric root of the cubic, then Newton to recover the digits
      // lost by asin near the endpoints.
      double t = 0.5 - std::sin(std::asin(1.0 - 2.0 * y) / 3.0);
      for (int it = 0; it < 3; ++it) {
        const double d = derivative(t);
        if (!(d > 0.0))
          break;
        const double next = t - (forward(t) - y) / d;
        if (next == t)
          break;
        t = std::clamp(next, 0.0, 1.0);
      }
      return t;
    }
  }
  throw std::logic_error("unknown transformation");
}

double Transformation::derivative(double t) const
{
  switch (family_) {
    case TransformationFamily::Identity:
      return 1.0;
    case TransformationFamily::Smoothstep:
      return 6.0 * t * (1.0 - t);
  }
  throw std::logic_error("unknown transformation");
}

double Transformation::derivative_bound() const
{
  switch (family_) {
    case TransformationFamily::Identity:
      return 1.0;
    case TransformationFamily::Smoothstep:
      return 1.5;
  }
  throw std::logic_error("unknown transformation");
}

std::string_view Transformation::name() const
{
  switch (family_) {
    case TransformationFamily::Identity:
      return "identity";
    case TransformationFamily::Smoothstep:
      return "smoothstep";
  }
  throw std::logic_error("unknown transformation");
}

Transformation transformation_from_name(std::string_view name)
{
  if (name == "identity")
    return Transformation(TransformationFamily::Identity);
  if (name == "smoothstep")
    return Transformation(TransformationFamily::Smoothstep);
  throw std::invalid_argument("unknown transformation '" + std::string(name) + "'");
}

double transformation_eval(const Transformation& phi, TransformMode mode, double t)
{
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("transformation argument outside [0,1]");
  switch (mode) {
    case TransformMode::Forward:
      return phi.forward(t);
    case TransformMode::Inverse:
      return phi.inverse(t);
    case TransformMode::Derivative:
      return phi.derivative(t);
  }
  throw std::logic_error("unknown transform mode");
}

} // namespace copula_lab
