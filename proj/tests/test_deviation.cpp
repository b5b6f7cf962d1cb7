#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "copula_lab/deviation.hpp"
#include "copula_lab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace copula_lab;

namespace {

SurfaceGrid filled(std::vector<double> us, std::vector<double> vs, double value)
{
  SurfaceGrid g(std::move(us), std::move(vs));
  std::fill(g.values.begin(), g.values.end(), value);
  return g;
}

SurfaceGrid random_surface(Rng& rng, std::size_t m)
{
  SurfaceGrid g(interior_lattice(m), interior_lattice(m));
  for (double& x : g.values)
    x = rng.uniform() - 0.5;
  return g;
}

} // namespace

TEST_CASE("R_n")
{
  // the commonly quoted 16.0848 agrees to about 1.5e-5 relative
  CHECK(std::abs(rn(1000) - 16.0848) < 16.0848 * 2e-5);
  CHECK(std::abs(rn(1000) - 16.084552712228383) < 1e-12);
  CHECK(std::abs(rn(1000) - std::sqrt(1000.0 / (2.0 * std::log(std::log(1000.0))))) < 1e-12);
  // direct evaluation at n = 16
  CHECK(std::abs(rn(16) - std::sqrt(16.0 / (2.0 * std::log(std::log(16.0))))) < 1e-12);
  CHECK(std::abs(rn(16) - 2.800860259872986) < 1e-12);
  CHECK(rn(8000) > rn(2000));
  CHECK_THROWS_WITH_AS(rn(15), "R_n undefined below n=16", std::invalid_argument);
}

TEST_CASE("bandwidth grid")
{
  const BandwidthGrid g = bandwidth_grid(1000, 1.0, BandwidthRule::inv_log(), 8);
  CHECK(std::abs(g.points.front() - 0.0069078) < 1e-7);
  CHECK(std::abs(g.points.back() - 0.144765) < 1e-6);
  CHECK(g.points.front() == std::log(1000.0) / 1000.0);
  CHECK(g.bn == 1.0 / std::log(1000.0));
  CHECK(g.theorem_conforming);
  CHECK(g.points.size() == 8);
  for (std::size_t k = 0; k < g.points.size(); ++k) {
    CHECK(g.points[k] >= g.points.front());
    CHECK(g.points[k] <= g.bn);
    if (k >= 2)
      CHECK(std::abs(g.points[k] / g.points[k - 1] - g.points[k - 1] / g.points[k - 2]) < 1e-12);
  }
  const BandwidthGrid two = bandwidth_grid(1000, 2.0, BandwidthRule::fixed_value(0.05), 2);
  CHECK(two.points == std::vector<double>{ 2.0 * std::log(1000.0) / 1000.0, 0.05 });
  CHECK_FALSE(two.theorem_conforming);
  CHECK_THROWS_WITH_AS(bandwidth_grid(1000, 30.0, BandwidthRule::fixed_value(0.05), 4),
                       "bandwidth range empty at this n",
                       std::invalid_argument);
  CHECK_THROWS_AS(bandwidth_grid(1000, 1.0, BandwidthRule::inv_log(), 1), std::invalid_argument);
}

TEST_CASE("deviation field")
{
  const auto lat = interior_lattice(3);
  const SurfaceGrid a = filled(lat, lat, 0.3);
  const SurfaceGrid b = filled(lat, lat, 0.7);
  const std::vector<SurfaceGrid> reps{ a, b };
  const auto dev = deviation_field(reps, mean_surface(reps));
  for (std::size_t c = 0; c < a.values.size(); ++c) {
    CHECK(std::abs(dev[0].values[c] + 0.2) < 1e-15);
    CHECK(std::abs(dev[0].values[c] + dev[1].values[c]) < 1e-15);
  }
  const std::vector<SurfaceGrid> same{ a, a, a };
  for (const auto& d : deviation_field(same, mean_surface(same)))
    CHECK(sup_abs(d) == 0.0);

  Rng rng(3);
  std::vector<SurfaceGrid> many;
  for (int r = 0; r < 50; ++r)
    many.push_back(random_surface(rng, 9));
  const auto d = deviation_field(many, mean_surface(many));
  for (std::size_t c = 0; c < d[0].values.size(); ++c) {
    double sum = 0.0;
    for (const auto& s : d)
      sum += s.values[c];
    CHECK(std::abs(sum / 50.0) < 1e-12);
  }
  CHECK_THROWS_AS(deviation_field(std::vector<SurfaceGrid>{ a }, a), std::invalid_argument);
  const SurfaceGrid other = filled(interior_lattice(4), lat, 0.0);
  CHECK_THROWS_AS(deviation_field(std::vector<SurfaceGrid>{ a, other }, a), std::invalid_argument);
  CHECK_THROWS_AS(mean_surface(std::vector<SurfaceGrid>{ a, other }), std::invalid_argument);
}

TEST_CASE("LIL statistic")
{
  const auto lat = interior_lattice(2);
  const std::vector<double> hs{ 0.01, 0.1 };
  std::vector<std::vector<SurfaceGrid>> zero(3, { filled(lat, lat, 0.0), filled(lat, lat, 0.0) });
  const DeviationReport z = lil_statistic(zero, hs, 1000);
  CHECK(z.exceed_fraction == 0.0);
  for (double s : z.lil_statistics)
    CHECK(s == 0.0);

  const std::vector<double> one_point{ 0.5 };
  std::vector<std::vector<SurfaceGrid>> single{ { filled(one_point, one_point, -0.04) } };
  const DeviationReport r = lil_statistic(single, std::vector<double>{ 0.1 }, 1000);
  CHECK(r.lil_statistics[0] == rn(1000) * 0.04);
  CHECK(r.rn == rn(1000));
  CHECK(r.records.size() == 1);
  CHECK(r.exceed_fraction == 0.0);

  Rng rng(5);
  std::vector<std::vector<SurfaceGrid>> devs;
  for (int rep = 0; rep < 40; ++rep)
    devs.push_back({ random_surface(rng, 5), random_surface(rng, 5), random_surface(rng, 5) });
  const std::vector<double> three{ 0.01, 0.05, 0.1 };
  const DeviationReport base = lil_statistic(devs, three, 2000);
  CHECK(base.records.size() == 120);
  for (std::size_t rep = 0; rep < devs.size(); ++rep) {
    double sup = 0.0;
    for (const auto& s : devs[rep])
      sup = std::max(sup, sup_abs(s));
    CHECK(base.lil_statistics[rep] == rn(2000) * sup);
  }
  // exact doubling
  auto doubled = devs;
  for (auto& row : doubled)
    for (auto& s : row)
      for (double& x : s.values)
        x *= 2.0;
  const DeviationReport twice = lil_statistic(doubled, three, 2000);
  for (std::size_t rep = 0; rep < devs.size(); ++rep)
    CHECK(twice.lil_statistics[rep] == 2.0 * base.lil_statistics[rep]);
  // refinement never decreases
  auto fewer = devs;
  for (auto& row : fewer)
    row.pop_back();
  const DeviationReport coarse = lil_statistic(fewer, std::vector<double>{ 0.01, 0.05 }, 2000);
  for (std::size_t rep = 0; rep < devs.size(); ++rep)
    CHECK(coarse.lil_statistics[rep] <= base.lil_statistics[rep]);
  // exceed fraction counts statistics above 3
  std::size_t above = 0;
  for (double s : base.lil_statistics)
    above += s > 3.0 ? 1 : 0;
  CHECK(base.exceed_fraction == static_cast<double>(above) / 40.0);
  CHECK(base.lil_quantiles[3] == *std::max_element(base.lil_statistics.begin(), base.lil_statistics.end()));
  CHECK_THROWS_AS(lil_statistic(devs, three, 10), std::invalid_argument);
}

TEST_CASE("sample quantile")
{
  CHECK(sample_quantile({ 3.0, 1.0, 2.0, 4.0 }, 0.5) == 2.5);
  CHECK(sample_quantile({ 3.0, 1.0, 2.0, 4.0 }, 1.0) == 4.0);
  CHECK(sample_quantile({ 3.0, 1.0, 2.0, 4.0 }, 0.0) == 1.0);
  CHECK(std::abs(sample_quantile({ 1.0, 2.0, 3.0, 4.0, 5.0 }, 0.9) - 4.6) < 1e-15);
  CHECK_THROWS_AS(sample_quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("fixed-bandwidth and uniform-in-bandwidth statistics")
{
  const auto lat = interior_lattice(4);
  const std::size_t n = 2000;
  Rng rng(7);
  SurfaceGrid tilde = random_surface(rng, 4);
  SurfaceGrid dev = tilde;
  for (double& x : dev.values)
    x /= std::sqrt(static_cast<double>(n));
  CHECK(prop1_statistic(dev, tilde, 0.05, n) < 1e-14);

  // |log h| = 1 at h = 1/e
  const SurfaceGrid zero = filled(lat, lat, 0.0);
  const double h = std::exp(-1.0);
  const double lln = std::log(std::log(static_cast<double>(n)));
  CHECK(std::abs(prop1_statistic(zero, tilde, h, n) -
                 sup_abs(tilde) / std::sqrt(h * std::max(1.0, lln))) < 1e-14);

  const BandwidthGrid grid = bandwidth_grid(n, 1.0, BandwidthRule::inv_log(), 3);
  std::vector<SurfaceGrid> none(3, filled(lat, lat, 0.0));
  const SurfaceGrid tilde_zero = filled(lat, lat, 0.0);
  CHECK(corollary2_statistic(none, tilde_zero, grid, n) == 0.0);

  const std::vector<double> pt{ 0.5 };
  const BandwidthGrid g2 = bandwidth_grid(n, 1.0, BandwidthRule::inv_log(), 2);
  std::vector<SurfaceGrid> devs{ filled(pt, pt, 0.001), filled(pt, pt, -0.002) };
  const SurfaceGrid t1 = filled(pt, pt, 0.01);
  const double expected =
    std::abs(std::sqrt(2000.0) * -0.002 - 0.01) / std::sqrt(g2.bn * lln);
  CHECK(std::abs(corollary2_statistic(devs, t1, g2, n) - expected) < 1e-14);
  CHECK_THROWS_AS(corollary2_statistic(none, tilde_zero, g2, n), std::invalid_argument);
}

TEST_CASE("prop1 column of the report")
{
  const auto lat = interior_lattice(3);
  Rng rng(9);
  std::vector<std::vector<SurfaceGrid>> devs;
  std::vector<SurfaceGrid> tildes;
  const std::vector<double> hs{ 0.02, 0.08 };
  for (int r = 0; r < 4; ++r) {
    devs.push_back({ random_surface(rng, 3), random_surface(rng, 3) });
    tildes.push_back(random_surface(rng, 3));
  }
  const DeviationReport rep = lil_statistic(devs, hs, 500, tildes);
  for (const auto& rec : rep.records)
    CHECK(rec.prop1_statistic == prop1_statistic(devs[rec.replicate][rec.h == 0.02 ? 0 : 1],
                                                 tildes[rec.replicate], rec.h, 500));
}

TEST_CASE("data-driven bandwidth inside the grid matches the fixed-bandwidth path")
{
  Rng rng(13);
  const BandwidthGrid grid = bandwidth_grid(400, 1.0, BandwidthRule::inv_log(), 5);
  const double h_hat = grid.points[2];
  const auto lat = interior_lattice(9);
  const CopulaModel model = CopulaModel::clayton(1.5);
  std::vector<SurfaceGrid> at_grid, at_hat;
  for (int r = 0; r < 10; ++r) {
    auto pairs = copula_sample(model, 400, rng);
    const PairedSample s(pairs.us, pairs.vs);
    at_grid.push_back(estimate_on_grid(TransformationEstimator{}, KernelSpec{}, s, grid.points[2], lat, lat));
    at_hat.push_back(estimate_on_grid(TransformationEstimator{}, KernelSpec{}, s, h_hat, lat, lat));
  }
  const auto d1 = deviation_field(at_grid, mean_surface(at_grid));
  const auto d2 = deviation_field(at_hat, mean_surface(at_hat));
  for (std::size_t r = 0; r < d1.size(); ++r)
    CHECK(d1[r].values == d2[r].values);
}

TEST_CASE("confidence band")
{
  CHECK(std::abs(band_halfwidth(1000, 0.1) - 3.3 / rn(1000)) < 1e-15);
  CHECK(std::abs(band_halfwidth(1000, 0.1) - 0.2051657922381114) < 1e-12);
  CHECK(std::abs(band_halfwidth(1000, 0.1) - 0.20516) < 1e-5);
  CHECK(band_halfwidth(1000, 0.0) == 3.0 / rn(1000));
  CHECK(band_halfwidth(8000, 0.0) < band_halfwidth(2000, 0.0));

  const double h = 0.1;
  const auto lat = span_lattice(5, h, 1.0 - h);
  SurfaceGrid est(lat, lat);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      est.at(i, j) = lat[i] * lat[j];
  const ConfidenceBand band = confidence_band(est, 1000, h, 0.1);
  for (std::size_t c = 0; c < est.values.size(); ++c) {
    CHECK(band.lower[c] == std::max(band.center[c] - band.halfwidth, 0.0));
    CHECK(band.upper[c] == std::min(band.center[c] + band.halfwidth, 1.0));
  }
  SurfaceGrid outside(interior_lattice(5), interior_lattice(5));
  CHECK_THROWS_WITH_AS(confidence_band(outside, 1000, 0.2, 0.1),
                       "band region violates boundary restriction",
                       std::invalid_argument);
}

TEST_CASE("envelope verifier")
{
  const GiResult epa = verify_gi(KernelSpec{}, Transformation{}, 20000, 1);
  CHECK(epa.kappa == 3.25);
  CHECK(epa.pass);
  CHECK(epa.max_abs_g <= 1.0);
  CHECK(epa.max_abs_g > 0.9);
  CHECK(verify_gi(KernelSpec(KernelFamily::Uniform), Transformation{}, 10, 1).kappa == 2.0);
  const GiResult smooth =
    verify_gi(KernelSpec(KernelFamily::Quartic), Transformation(TransformationFamily::Smoothstep), 20000, 2);
  CHECK(smooth.pass);
  CHECK(smooth.max_abs_g <= 1.0);
}

TEST_CASE("variance verifier")
{
  const CopulaModel pi = CopulaModel::independence();
  CHECK(gii_constant(KernelSpec{}, Transformation{}, pi) == 6.0);
  CHECK(gii_constant(KernelSpec{}, Transformation(TransformationFamily::Smoothstep), pi) == 9.0);
  const GiiResult r = verify_gii(KernelSpec{}, Transformation{}, pi, 0.05, 20000, 3);
  CHECK(std::abs(r.c0_times_h - 0.3) < 1e-15);
  CHECK(r.pass);
  CHECK(r.max_estimate > 0.0);
  CHECK_THROWS_AS(verify_gii(KernelSpec{}, Transformation{}, pi, 0.3, 20000, 3), std::invalid_argument);
  CHECK_THROWS_AS(verify_gii(KernelSpec{}, Transformation{}, pi, 0.05, 9999, 3), std::invalid_argument);
  // saturated kernels with the indicator equal to 1: g is identically 0
  const Eg2Estimate zero = estimate_eg2(KernelSpec{}, Transformation{}, pi, 0.1, 1.1, 1.1, 1000, 4);
  CHECK(zero.mean == 0.0);
  CHECK(zero.standard_error == 0.0);
}

TEST_CASE("fitted slope")
{
  const std::vector<double> x{ 1.0, 2.0, 3.0, 4.0 };
  const std::vector<double> y{ 3.0, 5.0, 7.0, 9.0 };
  CHECK(std::abs(fitted_slope(x, y) - 2.0) < 1e-14);
  CHECK_THROWS_AS(fitted_slope(std::vector<double>{ 1.0, 1.0 }, std::vector<double>{ 1.0, 2.0 }),
                  std::invalid_argument);
}

TEST_CASE("lattice discretisation bound")
{
  Rng rng(17);
  auto pairs = copula_sample(CopulaModel::fgm(0.8), 300, rng);
  const PairedSample s(pairs.us, pairs.vs);
  const double h = 0.04;
  const auto coarse = interior_lattice(9);
  const auto fine = span_lattice(81, coarse.front(), coarse.back());
  const KernelSpec spec;
  for (const EstimatorKind& kind :
       { EstimatorKind(TransformationEstimator{}),
         EstimatorKind(TransformationEstimator{ Transformation(TransformationFamily::Smoothstep) }),
         EstimatorKind(MirrorReflectionEstimator{}) }) {
    const auto bound = sup_discretization_bound(kind, spec, coarse, coarse, h);
    REQUIRE(bound.has_value());
    // a surface minus a constant mean: half the deviation bound applies
    const SurfaceGrid c = estimate_on_grid(kind, spec, s, h, coarse, coarse);
    const SurfaceGrid f = estimate_on_grid(kind, spec, s, h, fine, fine);
    double sup_c = 0.0, sup_f = 0.0;
    for (std::size_t i = 0; i < c.rows(); ++i)
      for (std::size_t j = 0; j < c.cols(); ++j)
        sup_c = std::max(sup_c, std::abs(c.at(i, j) - coarse[i] * coarse[j]));
    for (std::size_t i = 0; i < f.rows(); ++i)
      for (std::size_t j = 0; j < f.cols(); ++j)
        sup_f = std::max(sup_f, std::abs(f.at(i, j) - fine[i] * fine[j]));
    // the true surface uv adds Lipschitz constant 1 per coordinate
    const double uv_slack = 2.0 * 0.5 * (coarse[1] - coarse[0]);
    CHECK(sup_f - sup_c <= *bound / 2.0 + uv_slack);
  }
  CHECK_FALSE(sup_discretization_bound(LocalLinearEstimator{}, spec, coarse, coarse, h).has_value());
}
