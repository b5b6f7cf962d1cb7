#include "copula_lab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace copula_lab {

namespace {

enum class Type
{
  T,
  LL,
  MR
};

Type type_of(const EstimatorKind& kind)
{
  if (std::holds_alternative<TransformationEstimator>(kind))
    return Type::T;
  if (std::holds_alternative<LocalLinearEstimator>(kind))
    return Type::LL;
  return Type::MR;
}

void check_bandwidth(double h)
{
  if (!(h > 0.0 && h < 1.0))
    throw std::invalid_argument("bandwidth out of range");
}

void check_point(Type type, double u, double v)
{
  if (type == Type::MR) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("evaluation point outside [0,1]^2");
  } else if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
    throw std::invalid_argument("evaluation point outside (0,1)^2");
  }
}

// Per-observation factors along one coordinate, listed in the order that
// sorts the first coordinate. Every estimator is the mean over i of
// factor_u(i) * factor_v(i).
class FactorAxis
{
public:
  FactorAxis(Type type,
             KernelSpec spec,
             const Transformation& phi,
             const PseudoObservations& pseudo,
             bool second,
             double h)
    : type_(type)
    , spec_(spec)
    , phi_(phi)
    , h_(h)
  {
    const auto values = second ? pseudo.vs() : pseudo.us();
    coords_.reserve(values.size());
    for (std::size_t idx : pseudo.u_order())
      coords_.push_back(type == Type::T ? phi.inverse(values[idx]) : values[idx]);
  }

  std::size_t size() const { return coords_.size(); }

  void fill(double w, std::span<double> out) const
  {
    switch (type_) {
      case Type::T: {
        const double tw = phi_.inverse(w);
        for (std::size_t i = 0; i < coords_.size(); ++i)
          out[i] = integrated_kernel(spec_, (tw - coords_[i]) / h_);
        break;
      }
      case Type::LL: {
        const BoundaryWindow window = boundary_window(spec_, w, h_);
        for (std::size_t i = 0; i < coords_.size(); ++i)
          out[i] = local_linear_integrated(spec_, window, (w - coords_[i]) / h_);
        break;
      }
      case Type::MR: {
        for (std::size_t i = 0; i < coords_.size(); ++i) {
          const double c = coords_[i];
          const double reflected[3] = { c, -c, 2.0 - c };
          double sum = 0.0;
          for (double a : reflected)
            sum += integrated_kernel(spec_, (w - a) / h_) - integrated_kernel(spec_, (0.0 - a) / h_);
          out[i] = sum;
        }
        break;
      }
    }
  }

private:
  Type type_;
  KernelSpec spec_;
  Transformation phi_;
  double h_;
  std::vector<double> coords_;
};

Transformation phi_of(const EstimatorKind& kind)
{
  if (const auto* t = std::get_if<TransformationEstimator>(&kind))
    return t->phi;
  return Transformation{};
}

double pointwise(Type type,
                 KernelSpec spec,
                 const Transformation& phi,
                 const PseudoObservations& pseudo,
                 double h,
                 double u,
                 double v)
{
  check_bandwidth(h);
  check_point(type, u, v);
  const FactorAxis axis_u(type, spec, phi, pseudo, false, h);
  const FactorAxis axis_v(type, spec, phi, pseudo, true, h);
  std::vector<double> a(axis_u.size()), b(axis_v.size());
  axis_u.fill(u, a);
  axis_v.fill(v, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += a[i] * b[i];
  return sum / static_cast<double>(a.size());
}

} // namespace

std::string_view estimator_code(const EstimatorKind& kind)
{
  switch (type_of(kind)) {
    case Type::T:
      return "t";
    case Type::LL:
      return "ll";
    case Type::MR:
      return "mr";
  }
  throw std::logic_error("unknown estimator");
}

EstimatorKind estimator_from_code(std::string_view code, Transformation phi)
{
  if (code == "t")
    return TransformationEstimator{ phi };
  if (code == "ll")
    return LocalLinearEstimator{};
  if (code == "mr")
    return MirrorReflectionEstimator{};
  throw std::invalid_argument("unknown estimator '" + std::string(code) + "'");
}

double default_marginal_bandwidth(std::size_t n)
{
  return std::cbrt(1.0 / static_cast<double>(n));
}

SurfaceGrid::SurfaceGrid(std::vector<double> us, std::vector<double> vs)
  : u_points(std::move(us))
  , v_points(std::move(vs))
  , values(u_points.size() * v_points.size(), 0.0)
{
}

bool SurfaceGrid::same_lattice(const SurfaceGrid& other) const
{
  return u_points == other.u_points && v_points == other.v_points &&
         values.size() == other.values.size();
}

std::vector<double> interior_lattice(std::size_t m)
{
  if (m == 0)
    throw std::invalid_argument("lattice needs at least one point");
  std::vector<double> points(m);
  for (std::size_t j = 0; j < m; ++j)
    points[j] = static_cast<double>(j + 1) / static_cast<double>(m + 1);
  return points;
}

std::vector<double> span_lattice(std::size_t m, double lo, double hi)
{
  if (m == 0)
    throw std::invalid_argument("lattice needs at least one point");
  if (!(lo <= hi))
    throw std::invalid_argument("empty lattice range");
  if (m == 1)
    return { 0.5 * (lo + hi) };
  std::vector<double> points(m);
  for (std::size_t j = 0; j < m; ++j)
    points[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m - 1);
  points.back() = hi;
  return points;
}

double general_estimate(KernelSpec spec,
                        const Transformation& phi,
                        const PseudoObservations& pseudo,
                        double h,
                        double u,
                        double v)
{
  return pointwise(Type::T, spec, phi, pseudo, h, u, v);
}

double transformation_estimate(KernelSpec spec,
                               const Transformation& phi,
                               const PseudoObservations& pseudo,
                               double h,
                               double u,
                               double v)
{
  if (!pseudo.is_rescaled_rank())
    throw std::invalid_argument("transformation estimator requires rescaled ranks");
  return general_estimate(spec, phi, pseudo, h, u, v);
}

double local_linear_estimate(KernelSpec spec,
                             const PseudoObservations& pseudo,
                             double h,
                             double u,
                             double v)
{
  return pointwise(Type::LL, spec, Transformation{}, pseudo, h, u, v);
}

double local_linear_estimate(KernelSpec spec,
                             const PairedSample& sample,
                             double h,
                             double b1,
                             double b2,
                             double u,
                             double v)
{
  return local_linear_estimate(spec, pseudo_observations(sample, spec, b1, b2), h, u, v);
}

std::array<ReflectedPoints, 9> mirror_reflect_points(const PseudoObservations& pseudo)
{
  // sign pattern per reflection: +1 keep, -1 negate, 2 -> 2 - x
  constexpr int pattern[9][2] = { { 1, 1 },  { -1, 1 }, { 1, -1 }, { -1, -1 }, { 1, 2 },
                                  { -1, 2 }, { 2, 1 },  { 2, -1 }, { 2, 2 } };
  auto apply = [](int p, double x) { return p == 2 ? 2.0 - x : p * x; };
  std::array<ReflectedPoints, 9> sets;
  for (std::size_t l = 0; l < 9; ++l) {
    sets[l].reserve(pseudo.size());
    for (std::size_t i = 0; i < pseudo.size(); ++i)
      sets[l].emplace_back(apply(pattern[l][0], pseudo.us()[i]),
                           apply(pattern[l][1], pseudo.vs()[i]));
  }
  return sets;
}

double mr_partial(KernelSpec spec,
                  std::span<const std::pair<double, double>> reflected,
                  double h,
                  double u,
                  double v)
{
  check_bandwidth(h);
  if (reflected.empty())
    throw std::invalid_argument("empty sample");
  double sum = 0.0;
  for (const auto& [a, b] : reflected)
    sum += integrated_kernel(spec, (u - a) / h) * integrated_kernel(spec, (v - b) / h);
  return sum / static_cast<double>(reflected.size());
}

double mirror_reflection_estimate(KernelSpec spec,
                                  const PseudoObservations& pseudo,
                                  double h,
                                  double u,
                                  double v)
{
  return pointwise(Type::MR, spec, Transformation{}, pseudo, h, u, v);
}

PseudoObservations estimator_pseudo(const EstimatorKind& kind,
                                    KernelSpec spec,
                                    const PairedSample& sample)
{
  if (const auto* ll = std::get_if<LocalLinearEstimator>(&kind)) {
    const double fallback = default_marginal_bandwidth(sample.size());
    return pseudo_observations(sample, spec, ll->b1.value_or(fallback), ll->b2.value_or(fallback));
  }
  return pseudo_observations(sample);
}

double estimate(const EstimatorKind& kind,
                KernelSpec spec,
                const PseudoObservations& pseudo,
                double h,
                double u,
                double v)
{
  const Type type = type_of(kind);
  if (type == Type::T)
    return transformation_estimate(spec, phi_of(kind), pseudo, h, u, v);
  return pointwise(type, spec, Transformation{}, pseudo, h, u, v);
}

SurfaceGrid estimate_on_grid(const EstimatorKind& kind,
                             KernelSpec spec,
                             const PseudoObservations& pseudo,
                             double h,
                             std::span<const double> u_points,
                             std::span<const double> v_points)
{
  const Type type = type_of(kind);
  check_bandwidth(h);
  if (type == Type::T && !pseudo.is_rescaled_rank())
    throw std::invalid_argument("transformation estimator requires rescaled ranks");
  for (double u : u_points)
    check_point(type, u, 0.5);
  for (double v : v_points)
    check_point(type, 0.5, v);

  const Transformation phi = phi_of(kind);
  const FactorAxis axis_u(type, spec, phi, pseudo, false, h);
  const FactorAxis axis_v(type, spec, phi, pseudo, true, h);
  const std::size_t n = pseudo.size();
  const std::size_t cols = v_points.size();

  // Column factors with running sums: prefix[j][m] is the sequential sum of
  // the first m factors, so a row whose leading factors are exactly 1 can
  // start from it and add the same terms in the same order as the
  // pointwise loop.
  std::vector<double> col_factors(cols * n);
  std::vector<double> prefix(cols * (n + 1));
  for (std::size_t j = 0; j < cols; ++j) {
    std::span<double> b(col_factors.data() + j * n, n);
    axis_v.fill(v_points[j], b);
    double* p = prefix.data() + j * (n + 1);
    p[0] = 0.0;
    for (std::size_t m = 0; m < n; ++m)
      p[m + 1] = p[m] + b[m];
  }

  SurfaceGrid grid(std::vector<double>(u_points.begin(), u_points.end()),
                   std::vector<double>(v_points.begin(), v_points.end()));
  std::vector<double> a(n);
  std::vector<std::size_t> active;
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < u_points.size(); ++i) {
    axis_u.fill(u_points[i], a);
    std::size_t ones = 0;
    while (ones < n && a[ones] == 1.0)
      ++ones;
    active.clear();
    for (std::size_t m = ones; m < n; ++m)
      if (a[m] != 0.0)
        active.push_back(m);
    for (std::size_t j = 0; j < cols; ++j) {
      const double* b = col_factors.data() + j * n;
      double sum = prefix[j * (n + 1) + ones];
      for (std::size_t m : active)
        sum += a[m] * b[m];
      grid.at(i, j) = sum / nd;
    }
  }
  return grid;
}

SurfaceGrid estimate_on_grid(const EstimatorKind& kind,
                             KernelSpec spec,
                             const PairedSample& sample,
                             double h,
                             std::span<const double> u_points,
                             std::span<const double> v_points)
{
  return estimate_on_grid(
    kind, spec, estimator_pseudo(kind, spec, sample), h, u_points, v_points);
}

} // namespace copula_lab
