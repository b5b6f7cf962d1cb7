#include "copula_lab/empirical.hpp"

#include "copula_lab/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace copula_lab {

namespace {

// Average ranks (1-based); returns true when any value repeats.
bool average_ranks(std::span<const double> values, std::vector<double>& ranks)
{
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  ranks.assign(n, 0.0);
  bool ties = false;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]])
      ++j;
    if (j - i > 1)
      ties = true;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      ranks[order[k]] = rank;
    i = j;
  }
  return ties;
}

void check_unit_closed(double u, const char* what)
{
  if (!(u >= 0.0 && u <= 1.0))
    throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

// Number of sorted entries <= x.
std::size_t count_le(std::span<const double> sorted, double x)
{
  return static_cast<std::size_t>(
    std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

// For each value, the number of lattice points strictly below it; a value is
// dominated by lattice point p exactly when its index is <= p's position.
std::vector<std::size_t> lattice_slot(std::span<const double> values,
                                      std::span<const double> points)
{
  std::vector<std::size_t> slot(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    slot[i] = static_cast<std::size_t>(
      std::lower_bound(points.begin(), points.end(), values[i]) - points.begin());
  }
  return slot;
}

// counts[a][b] = #{i : slot_u[i] <= a, slot_v[i] <= b}, divided by n.
std::vector<double> dominance_fractions(std::span<const std::size_t> slot_u,
                                        std::span<const std::size_t> slot_v,
                                        std::size_t rows,
                                        std::size_t cols)
{
  std::vector<std::size_t> counts((rows + 1) * (cols + 1), 0);
  for (std::size_t i = 0; i < slot_u.size(); ++i)
    ++counts[slot_u[i] * (cols + 1) + slot_v[i]];
  for (std::size_t a = 0; a <= rows; ++a)
    for (std::size_t b = 0; b <= cols; ++b) {
      std::size_t c = counts[a * (cols + 1) + b];
      if (a > 0)
        c += counts[(a - 1) * (cols + 1) + b];
      if (b > 0)
        c += counts[a * (cols + 1) + b - 1];
      if (a > 0 && b > 0)
        c -= counts[(a - 1) * (cols + 1) + b - 1];
      counts[a * (cols + 1) + b] = c;
    }
  const double n = static_cast<double>(slot_u.size());
  std::vector<double> out(rows * cols);
  for (std::size_t a = 0; a < rows; ++a)
    for (std::size_t b = 0; b < cols; ++b)
      out[a * cols + b] = static_cast<double>(counts[a * (cols + 1) + b]) / n;
  return out;
}

void check_sorted(std::span<const double> points)
{
  if (!std::is_sorted(points.begin(), points.end()))
    throw std::invalid_argument("lattice points must be sorted");
}

} // namespace

PairedSample::PairedSample(std::vector<double> xs, std::vector<double> ys)
  : xs_(std::move(xs))
  , ys_(std::move(ys))
{
  if (xs_.size() != ys_.size())
    throw std::invalid_argument("xs and ys must have the same length");
  if (xs_.size() < 2)
    throw std::invalid_argument("sample needs at least 2 observations");
  for (std::size_t i = 0; i < xs_.size(); ++i)
    if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i]))
      throw std::invalid_argument("sample contains non-finite values");
  sorted_xs_ = xs_;
  sorted_ys_ = ys_;
  std::sort(sorted_xs_.begin(), sorted_xs_.end());
  std::sort(sorted_ys_.begin(), sorted_ys_.end());
  x_ties_ = average_ranks(xs_, x_ranks_);
  y_ties_ = average_ranks(ys_, y_ranks_);
}

PairedSample PairedSample::swapped() const
{
  return PairedSample(ys_, xs_);
}

PseudoObservations::PseudoObservations(std::vector<double> us,
                                       std::vector<double> vs,
                                       PseudoVariant variant,
                                       bool ties)
  : us_(std::move(us))
  , vs_(std::move(vs))
  , variant_(variant)
  , ties_(ties)
{
  if (us_.size() != vs_.size())
    throw std::invalid_argument("pseudo-observation coordinates differ in length");
  if (us_.empty())
    throw std::invalid_argument("empty sample");
  for (std::size_t i = 0; i < us_.size(); ++i)
    if (!std::isfinite(us_[i]) || !std::isfinite(vs_[i]))
      throw std::invalid_argument("pseudo-observations must be finite");
  u_order_.resize(us_.size());
  std::iota(u_order_.begin(), u_order_.end(), std::size_t{ 0 });
  std::stable_sort(u_order_.begin(), u_order_.end(), [&](std::size_t a, std::size_t b) {
    return us_[a] < us_[b];
  });
}

PseudoObservations PseudoObservations::swapped() const
{
  PseudoVariant v = variant_;
  if (auto* sm = std::get_if<SmoothedMarginal>(&v))
    std::swap(sm->b1, sm->b2);
  return PseudoObservations(vs_, us_, v, ties_);
}

double ecdf_eval(std::span<const double> data, double x)
{
  if (data.empty())
    throw std::invalid_argument("empty sample");
  const auto count = std::count_if(data.begin(), data.end(), [x](double d) { return d <= x; });
  return static_cast<double>(count) / static_cast<double>(data.size());
}

double ecdf_eval_sorted(std::span<const double> sorted, double x)
{
  if (sorted.empty())
    throw std::invalid_argument("empty sample");
  return static_cast<double>(count_le(sorted, x)) / static_cast<double>(sorted.size());
}

double generalized_inverse_sorted(std::span<const double> sorted, double u)
{
  if (sorted.empty())
    throw std::invalid_argument("empty sample");
  if (!(u > 0.0 && u <= 1.0))
    throw std::invalid_argument("quantile level out of range");
  const std::size_t n = sorted.size();
  const double nd = static_cast<double>(n);
  // smallest k with k/n >= u, using the same division as the ECDF
  auto k = static_cast<std::size_t>(std::ceil(u * nd));
  k = std::clamp<std::size_t>(k, 1, n);
  while (k > 1 && static_cast<double>(k - 1) / nd >= u)
    --k;
  while (k < n && static_cast<double>(k) / nd < u)
    ++k;
  return sorted[k - 1];
}

double generalized_inverse(std::span<const double> data, double u)
{
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  return generalized_inverse_sorted(sorted, u);
}

PseudoObservations pseudo_observations(const PairedSample& sample)
{
  const double denom = static_cast<double>(sample.size() + 1);
  std::vector<double> us(sample.size()), vs(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    us[i] = sample.x_ranks()[i] / denom;
    vs[i] = sample.y_ranks()[i] / denom;
  }
  return PseudoObservations(std::move(us), std::move(vs), RescaledRank{}, sample.has_ties());
}

namespace {

// smoothed_marginal over sorted data: observations more than 1.5 b below x
// contribute exactly 1 and those more than 1.5 b above exactly 0, so only
// the window in between is evaluated.
double smoothed_marginal_sorted(KernelSpec kernel,
                                std::span<const double> sorted,
                                double b,
                                double x)
{
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - 1.5 * b);
  const auto last = std::upper_bound(first, sorted.end(), x + 1.5 * b);
  double sum = static_cast<double>(first - sorted.begin());
  for (auto it = first; it != last; ++it)
    sum += integrated_kernel(kernel, (x - *it) / b);
  return sum / static_cast<double>(sorted.size());
}

} // namespace

PseudoObservations pseudo_observations(const PairedSample& sample,
                                       KernelSpec kernel,
                                       double b1,
                                       double b2)
{
  if (!(b1 > 0.0 && b1 < 1.0) || !(b2 > 0.0 && b2 < 1.0))
    throw std::invalid_argument("marginal bandwidths must lie in (0,1)");
  std::vector<double> us(sample.size()), vs(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    us[i] = smoothed_marginal_sorted(kernel, sample.sorted_xs(), b1, sample.xs()[i]);
    vs[i] = smoothed_marginal_sorted(kernel, sample.sorted_ys(), b2, sample.ys()[i]);
  }
  return PseudoObservations(
    std::move(us), std::move(vs), SmoothedMarginal{ b1, b2 }, sample.has_ties());
}

double empirical_copula(const PairedSample& sample, double u, double v)
{
  check_unit_closed(u, "u");
  check_unit_closed(v, "v");
  if (u == 0.0 || v == 0.0)
    return 0.0;
  const double x_cut = generalized_inverse_sorted(sample.sorted_xs(), u);
  const double y_cut = generalized_inverse_sorted(sample.sorted_ys(), v);
  std::size_t count = 0;
  for (std::size_t i = 0; i < sample.size(); ++i)
    if (sample.xs()[i] <= x_cut && sample.ys()[i] <= y_cut)
      ++count;
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

double empirical_copula_process(const PairedSample& sample,
                                const CopulaModel& model,
                                double u,
                                double v)
{
  const double cn = empirical_copula(sample, u, v);
  return std::sqrt(static_cast<double>(sample.size())) * (cn - model.cdf(u, v));
}

double uniform_empirical_cdf(std::span<const double> us,
                             std::span<const double> vs,
                             double u,
                             double v)
{
  if (us.size() != vs.size())
    throw std::invalid_argument("coordinates differ in length");
  if (us.empty())
    throw std::invalid_argument("empty sample");
  check_unit_closed(u, "u");
  check_unit_closed(v, "v");
  std::size_t count = 0;
  for (std::size_t i = 0; i < us.size(); ++i)
    if (us[i] <= u && vs[i] <= v)
      ++count;
  return static_cast<double>(count) / static_cast<double>(us.size());
}

double uniform_empirical_cdf(const PseudoObservations& pseudo, double u, double v)
{
  return uniform_empirical_cdf(pseudo.us(), pseudo.vs(), u, v);
}

std::vector<double> empirical_copula_on_grid(const PairedSample& sample,
                                             std::span<const double> u_points,
                                             std::span<const double> v_points)
{
  check_sorted(u_points);
  check_sorted(v_points);
  // X_i <= F_n^-1(u) is a comparison against the order-statistic cut, so
  // map each lattice level to its cut and reuse the dominance counts.
  auto cuts = [](std::span<const double> sorted, std::span<const double> points) {
    std::vector<double> c(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      check_unit_closed(points[k], "lattice point");
      c[k] = points[k] == 0.0 ? -HUGE_VAL : generalized_inverse_sorted(sorted, points[k]);
    }
    return c;
  };
  const auto x_cuts = cuts(sample.sorted_xs(), u_points);
  const auto y_cuts = cuts(sample.sorted_ys(), v_points);
  return dominance_fractions(lattice_slot(sample.xs(), x_cuts),
                             lattice_slot(sample.ys(), y_cuts),
                             u_points.size(),
                             v_points.size());
}

std::vector<double> uniform_empirical_cdf_on_grid(std::span<const double> us,
                                                  std::span<const double> vs,
                                                  std::span<const double> u_points,
                                                  std::span<const double> v_points)
{
  if (us.size() != vs.size())
    throw std::invalid_argument("coordinates differ in length");
  if (us.empty())
    throw std::invalid_argument("empty sample");
  check_sorted(u_points);
  check_sorted(v_points);
  return dominance_fractions(
    lattice_slot(us, u_points), lattice_slot(vs, v_points), u_points.size(), v_points.size());
}

} // namespace copula_lab
