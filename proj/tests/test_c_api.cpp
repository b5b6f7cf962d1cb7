#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "copula_lab/copula_lab.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

struct Sample
{
  cl_sample* ptr = nullptr;
  ~Sample() { cl_sample_destroy(ptr); }
};

} // namespace

TEST_CASE("status names and error reporting")
{
  CHECK(std::string(cl_status_name(CL_OK)) == "ok");
  CHECK(std::string(cl_status_name(CL_PARSE_ERROR)) == "parse_error");
  double out = 0.0;
  CHECK(cl_rn(10, &out) == CL_INVALID_ARGUMENT);
  CHECK(std::string(cl_last_error_message()) == "R_n undefined below n=16");
  CHECK(cl_rn(1000, &out) == CL_OK);
  CHECK(std::abs(out - 16.084552712228383) < 1e-12);
  CHECK(std::string(cl_last_error_message()).empty());
  CHECK(cl_rn(1000, nullptr) == CL_INVALID_ARGUMENT);
}

TEST_CASE("samples and empirical functions")
{
  const double xs[] = { 1.0, 2.0, 3.0 };
  const double ys[] = { 1.0, 3.0, 2.0 };
  Sample s;
  REQUIRE(cl_sample_create(xs, ys, 3, &s.ptr) == CL_OK);
  CHECK(cl_sample_size(s.ptr) == 3);
  CHECK(cl_sample_has_ties(s.ptr) == 0);
  double v = 0.0;
  CHECK(cl_empirical_copula(s.ptr, 2.0 / 3.0, 2.0 / 3.0, &v) == CL_OK);
  CHECK(std::abs(v - 1.0 / 3.0) < 1e-15);
  CHECK(cl_ecdf(xs, 3, 2.0, &v) == CL_OK);
  CHECK(std::abs(v - 2.0 / 3.0) < 1e-15);
  CHECK(cl_generalized_inverse(xs, 3, 0.5, &v) == CL_OK);
  CHECK(v == 2.0);
  CHECK(cl_generalized_inverse(xs, 3, 0.0, &v) == CL_INVALID_ARGUMENT);
  CHECK(cl_ecdf(nullptr, 0, 1.0, &v) == CL_INVALID_ARGUMENT);

  cl_pseudo* p = nullptr;
  REQUIRE(cl_pseudo_ranks(s.ptr, &p) == CL_OK);
  std::vector<double> us(3), vs(3);
  CHECK(cl_pseudo_values(p, us.data(), vs.data()) == CL_OK);
  CHECK(us == std::vector<double>{ 0.25, 0.5, 0.75 });
  CHECK(vs == std::vector<double>{ 0.25, 0.75, 0.5 });
  cl_pseudo_destroy(p);
  REQUIRE(cl_pseudo_smoothed(s.ptr, "epanechnikov", 0.5, 0.5, &p) == CL_OK);
  CHECK(cl_pseudo_values(p, us.data(), vs.data()) == CL_OK);
  CHECK(std::abs(us[1] - 0.5) < 1e-12);
  cl_pseudo_destroy(p);

  Sample bad;
  CHECK(cl_sample_parse_csv("x,y\n1,2\n3\n", &bad.ptr) == CL_PARSE_ERROR);
  CHECK(cl_last_error_line() == 3);
  CHECK(bad.ptr == nullptr);
  CHECK(cl_sample_read_csv("/nonexistent/file.csv", &bad.ptr) == CL_IO_ERROR);
}

TEST_CASE("kernels and transforms")
{
  double v = 0.0;
  CHECK(cl_kernel_eval("epanechnikov", 0.5, &v) == CL_OK);
  CHECK(v == 0.5625);
  CHECK(cl_integrated_kernel("epanechnikov", 0.5, &v) == CL_OK);
  CHECK(std::abs(v - 0.84375) < 1e-12);
  CHECK(cl_boundary_moment("epanechnikov", 0.0, 0.5, 1, &v) == CL_OK);
  CHECK(std::abs(v + 0.1875) < 1e-12);
  CHECK(cl_local_linear_kernel("epanechnikov", 0.0, 0.5, -0.5, &v) == CL_OK);
  CHECK(std::abs(v - 0.23684) < 1e-5);
  CHECK(cl_local_linear_kernel("epanechnikov", -0.0999, 0.1, -0.9995, &v) == CL_DOMAIN_ERROR);
  CHECK(cl_transform("smoothstep", CL_TRANSFORM_DERIVATIVE, 0.5, &v) == CL_OK);
  CHECK(v == 1.5);
  CHECK(cl_transform("smoothstep", CL_TRANSFORM_FORWARD, 1.5, &v) == CL_INVALID_ARGUMENT);
  CHECK(cl_kernel_eval("triangle", 0.0, &v) == CL_INVALID_ARGUMENT);
}

TEST_CASE("copulas")
{
  cl_copula* c = nullptr;
  REQUIRE(cl_copula_create("clayton", 2.0, &c) == CL_OK);
  double v = 0.0;
  CHECK(cl_copula_cdf(c, 0.5, 0.5, &v) == CL_OK);
  CHECK(std::abs(v - 1.0 / std::sqrt(7.0)) < 1e-12);
  CHECK(cl_copula_partial(c, CL_PARTIAL_U, 0.5, 0.5, &v) == CL_OK);
  CHECK(std::abs(v - 8.0 * std::pow(7.0, -1.5)) < 1e-12);
  std::vector<double> us(50), vs(50), us2(50), vs2(50);
  CHECK(cl_copula_sample(c, 50, 9, us.data(), vs.data()) == CL_OK);
  CHECK(cl_copula_sample(c, 50, 9, us2.data(), vs2.data()) == CL_OK);
  CHECK(us == us2);
  CHECK(vs == vs2);
  double max_est = 0.0, thr = 0.0;
  int pass = 0;
  cl_copula* pi = nullptr;
  REQUIRE(cl_copula_create("independence", 0.0, &pi) == CL_OK);
  CHECK(cl_verify_gii("epanechnikov", "identity", pi, 0.05, 10000, 1, &max_est, &thr, &pass) == CL_OK);
  CHECK(std::abs(thr - 0.3) < 1e-15);
  CHECK(pass == 1);
  double g = 0.0, kappa = 0.0;
  CHECK(cl_verify_gi("uniform", "identity", 1000, 1, &g, &kappa, &pass) == CL_OK);
  CHECK(kappa == 2.0);
  CHECK(pass == 1);
  cl_copula_destroy(pi);
  cl_copula_destroy(c);
  CHECK(cl_copula_create("fgm", 3.0, &c) == CL_INVALID_ARGUMENT);
  CHECK(cl_band_halfwidth(1000, 0.1, &v) == CL_OK);
  CHECK(std::abs(v - 0.20516) < 1e-5);
}

TEST_CASE("estimators")
{
  Sample s;
  REQUIRE(cl_sample_parse_csv("x,y\n1,1\n2,3\n3,2\n", &s.ptr) == CL_OK);
  cl_estimator* t = nullptr;
  REQUIRE(cl_estimator_create("t", "identity", "epanechnikov", &t) == CL_OK);
  double v = 0.0;
  CHECK(cl_estimate(t, s.ptr, 0.1, 0.5, 0.5, &v) == CL_OK);
  CHECK(std::abs(v - 1.0 / 3.0) < 1e-15);
  CHECK(cl_estimate(t, s.ptr, 1.5, 0.5, 0.5, &v) == CL_INVALID_ARGUMENT);
  CHECK(std::string(cl_last_error_message()) == "bandwidth out of range");
  const double pts[] = { 0.25, 0.5, 0.75 };
  double grid[9];
  CHECK(cl_estimate_grid(t, s.ptr, 0.1, pts, 3, pts, 3, grid) == CL_OK);
  CHECK(cl_estimate(t, s.ptr, 0.1, 0.5, 0.75, &v) == CL_OK);
  CHECK(grid[1 * 3 + 2] == v);
  cl_estimator_destroy(t);

  cl_estimator* mr = nullptr;
  REQUIRE(cl_estimator_create("mr", nullptr, nullptr, &mr) == CL_OK);
  CHECK(cl_estimate(mr, s.ptr, 0.2, 0.0, 0.4, &v) == CL_OK);
  CHECK(v == 0.0);
  cl_estimator_destroy(mr);

  cl_estimator* ll = nullptr;
  REQUIRE(cl_estimator_create("ll", "identity", "quartic", &ll) == CL_OK);
  CHECK(cl_estimator_set_marginal_bandwidths(ll, 0.5, 0.5) == CL_OK);
  CHECK(cl_estimate(ll, s.ptr, 0.005, 0.99, 0.99, &v) == CL_OK);
  CHECK(std::abs(v - 1.0) < 1e-12);
  CHECK(cl_estimator_set_marginal_bandwidths(ll, 0.0, 0.5) == CL_INVALID_ARGUMENT);
  cl_estimator_destroy(ll);
  CHECK(cl_estimator_create("kde", nullptr, nullptr, &ll) == CL_INVALID_ARGUMENT);
}

TEST_CASE("configuration and runs")
{
  cl_config* c = nullptr;
  REQUIRE(cl_config_create(&c) == CL_OK);
  CHECK(cl_config_set(c, "n", "abc") == CL_PARSE_ERROR);
  CHECK(cl_config_set(c, "command", "verify") == CL_OK);
  CHECK(cl_config_set(c, "probes", "100") == CL_OK);
  CHECK(cl_config_set(c, "draws", "10000") == CL_OK);
  const auto out = std::filesystem::temp_directory_path() / "copula_lab_c_api_verify.json";
  CHECK(cl_config_set(c, "out", out.string().c_str()) == CL_OK);
  size_t needed = 0;
  CHECK(cl_config_serialize(c, nullptr, 0, &needed) == CL_BUFFER_TOO_SMALL);
  std::vector<char> buffer(needed);
  CHECK(cl_config_serialize(c, buffer.data(), buffer.size(), &needed) == CL_OK);
  cl_config* back = nullptr;
  REQUIRE(cl_config_parse(buffer.data(), &back) == CL_OK);
  std::vector<char> again(needed);
  CHECK(cl_config_serialize(back, again.data(), again.size(), nullptr) == CL_OK);
  CHECK(std::strcmp(buffer.data(), again.data()) == 0);
  CHECK(cl_run(c) == CL_OK);
  CHECK(std::filesystem::exists(out));
  CHECK(cl_config_set(c, "out", "") == CL_OK);
  CHECK(cl_run(c) == CL_INVALID_ARGUMENT);
  cl_config_destroy(back);
  cl_config_destroy(c);
}
