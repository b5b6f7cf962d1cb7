#include "copula_lab/copula_lab.h"

#include "copula_lab/copulas.hpp"
#include "copula_lab/deviation.hpp"
#include "copula_lab/empirical.hpp"
#include "copula_lab/error.hpp"
#include "copula_lab/estimators.hpp"
#include "copula_lab/harness.hpp"
#include "copula_lab/kernels.hpp"

#include <cstring>
#include <new>
#include <string>

using namespace copula_lab;

struct cl_sample
{
  PairedSample value;
};

struct cl_pseudo
{
  PseudoObservations value;
};

struct cl_copula
{
  CopulaModel value;
};

struct cl_estimator
{
  EstimatorKind kind;
  KernelSpec spec;
};

struct cl_config
{
  RunConfig value;
};

namespace {

thread_local std::string last_error;
thread_local std::size_t last_line = 0;

cl_status fail(cl_status status, const char* message, std::size_t line = 0)
{
  last_error = message;
  last_line = line;
  return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
cl_status guarded(Body body)
{
  try {
    body();
    last_error.clear();
    last_line = 0;
    return CL_OK;
  } catch (const ParseError& e) {
    return fail(CL_PARSE_ERROR, e.what(), e.line());
  } catch (const IoError& e) {
    return fail(CL_IO_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CL_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(CL_DOMAIN_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CL_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CL_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(CL_INTERNAL_ERROR, "unknown error");
  }
}

void need(const void* p, const char* name)
{
  if (p == nullptr)
    throw std::invalid_argument(std::string("null argument '") + name + "'");
}

std::string text(const char* s, const char* name)
{
  need(s, name);
  return s;
}

} // namespace

extern "C" {

const char* cl_status_name(cl_status status)
{
  switch (status) {
    case CL_OK:
      return "ok";
    case CL_INVALID_ARGUMENT:
      return "invalid_argument";
    case CL_DOMAIN_ERROR:
      return "domain_error";
    case CL_PARSE_ERROR:
      return "parse_error";
    case CL_IO_ERROR:
      return "io_error";
    case CL_BUFFER_TOO_SMALL:
      return "buffer_too_small";
    case CL_INTERNAL_ERROR:
      return "internal_error";
  }
  return "unknown";
}

const char* cl_last_error_message(void)
{
  return last_error.c_str();
}

size_t cl_last_error_line(void)
{
  return last_line;
}

cl_status cl_sample_create(const double* xs, const double* ys, size_t n, cl_sample** out)
{
  return guarded([&] {
    need(xs, "xs");
    need(ys, "ys");
    need(out, "out");
    *out = new cl_sample{ PairedSample(std::vector<double>(xs, xs + n),
                                       std::vector<double>(ys, ys + n)) };
  });
}

cl_status cl_sample_parse_csv(const char* csv, cl_sample** out)
{
  return guarded([&] {
    need(out, "out");
    *out = new cl_sample{ parse_sample_csv(text(csv, "text")) };
  });
}

cl_status cl_sample_read_csv(const char* path, cl_sample** out)
{
  return guarded([&] {
    need(out, "out");
    *out = new cl_sample{ read_sample_csv(text(path, "path")) };
  });
}

size_t cl_sample_size(const cl_sample* sample)
{
  return sample ? sample->value.size() : 0;
}

int cl_sample_has_ties(const cl_sample* sample)
{
  return sample && sample->value.has_ties() ? 1 : 0;
}

void cl_sample_destroy(cl_sample* sample)
{
  delete sample;
}

cl_status cl_ecdf(const double* data, size_t n, double x, double* out)
{
  return guarded([&] {
    need(out, "out");
    if (n > 0)
      need(data, "data");
    *out = ecdf_eval(std::span<const double>(data, n), x);
  });
}

cl_status cl_generalized_inverse(const double* data, size_t n, double u, double* out)
{
  return guarded([&] {
    need(out, "out");
    if (n > 0)
      need(data, "data");
    *out = generalized_inverse(std::span<const double>(data, n), u);
  });
}

cl_status cl_empirical_copula(const cl_sample* sample, double u, double v, double* out)
{
  return guarded([&] {
    need(sample, "sample");
    need(out, "out");
    *out = empirical_copula(sample->value, u, v);
  });
}

cl_status cl_pseudo_ranks(const cl_sample* sample, cl_pseudo** out)
{
  return guarded([&] {
    need(sample, "sample");
    need(out, "out");
    *out = new cl_pseudo{ pseudo_observations(sample->value) };
  });
}

cl_status cl_pseudo_smoothed(const cl_sample* sample,
                             const char* kernel,
                             double b1,
                             double b2,
                             cl_pseudo** out)
{
  return guarded([&] {
    need(sample, "sample");
    need(out, "out");
    const KernelSpec spec = kernel_from_name(text(kernel, "kernel"));
    *out = new cl_pseudo{ pseudo_observations(sample->value, spec, b1, b2) };
  });
}

size_t cl_pseudo_size(const cl_pseudo* pseudo)
{
  return pseudo ? pseudo->value.size() : 0;
}

cl_status cl_pseudo_values(const cl_pseudo* pseudo, double* us, double* vs)
{
  return guarded([&] {
    need(pseudo, "pseudo");
    need(us, "us");
    need(vs, "vs");
    const auto u = pseudo->value.us();
    const auto v = pseudo->value.vs();
    std::copy(u.begin(), u.end(), us);
    std::copy(v.begin(), v.end(), vs);
  });
}

void cl_pseudo_destroy(cl_pseudo* pseudo)
{
  delete pseudo;
}

cl_status cl_kernel_eval(const char* kernel, double t, double* out)
{
  return guarded([&] {
    need(out, "out");
    *out = kernel_eval(kernel_from_name(text(kernel, "kernel")), t);
  });
}

cl_status cl_integrated_kernel(const char* kernel, double x, double* out)
{
  return guarded([&] {
    need(out, "out");
    *out = integrated_kernel(kernel_from_name(text(kernel, "kernel")), x);
  });
}

cl_status cl_boundary_moment(const char* kernel, double w, double h, int j, double* out)
{
  return guarded([&] {
    need(out, "out");
    *out = boundary_moments(kernel_from_name(text(kernel, "kernel")), w, h, j);
  });
}

cl_status cl_local_linear_kernel(const char* kernel, double w, double h, double t, double* out)
{
  return guarded([&] {
    need(out, "out");
    *out = local_linear_kernel(kernel_from_name(text(kernel, "kernel")), w, h, t);
  });
}

cl_status cl_transform(const char* phi, cl_transform_mode mode, double t, double* out)
{
  return guarded([&] {
    need(out, "out");
    const Transformation f = transformation_from_name(text(phi, "phi"));
    switch (mode) {
      case CL_TRANSFORM_FORWARD:
        *out = transformation_eval(f, TransformMode::Forward, t);
        return;
      case CL_TRANSFORM_INVERSE:
        *out = transformation_eval(f, TransformMode::Inverse, t);
        return;
      case CL_TRANSFORM_DERIVATIVE:
        *out = transformation_eval(f, TransformMode::Derivative, t);
        return;
    }
    throw std::invalid_argument("unknown transform mode");
  });
}

cl_status cl_copula_create(const char* name, double parameter, cl_copula** out)
{
  return guarded([&] {
    need(out, "out");
    *out = new cl_copula{ CopulaModel::from_name(text(name, "name"), parameter) };
  });
}

cl_status cl_copula_cdf(const cl_copula* copula, double u, double v, double* out)
{
  return guarded([&] {
    need(copula, "copula");
    need(out, "out");
    *out = copula_cdf(copula->value, u, v);
  });
}

cl_status cl_copula_partial(const cl_copula* copula,
                            cl_partial_wrt wrt,
                            double u,
                            double v,
                            double* out)
{
  return guarded([&] {
    need(copula, "copula");
    need(out, "out");
    if (wrt != CL_PARTIAL_U && wrt != CL_PARTIAL_V)
      throw std::invalid_argument("unknown partial direction");
    *out = copula_partial(copula->value, wrt == CL_PARTIAL_U ? PartialWrt::U : PartialWrt::V, u, v);
  });
}

cl_status cl_copula_sample(const cl_copula* copula, size_t n, uint64_t seed, double* us, double* vs)
{
  return guarded([&] {
    need(copula, "copula");
    need(us, "us");
    need(vs, "vs");
    Rng rng(seed);
    const UniformPairs pairs = copula_sample(copula->value, n, rng);
    std::copy(pairs.us.begin(), pairs.us.end(), us);
    std::copy(pairs.vs.begin(), pairs.vs.end(), vs);
  });
}

void cl_copula_destroy(cl_copula* copula)
{
  delete copula;
}

cl_status cl_estimator_create(const char* code, const char* phi, const char* kernel, cl_estimator** out)
{
  return guarded([&] {
    need(out, "out");
    const Transformation f = phi ? transformation_from_name(phi) : Transformation{};
    const KernelSpec spec = kernel ? kernel_from_name(kernel) : KernelSpec{};
    *out = new cl_estimator{ estimator_from_code(text(code, "code"), f), spec };
  });
}

cl_status cl_estimator_set_marginal_bandwidths(cl_estimator* estimator, double b1, double b2)
{
  return guarded([&] {
    need(estimator, "estimator");
    if (!(b1 > 0.0 && b1 < 1.0 && b2 > 0.0 && b2 < 1.0))
      throw std::invalid_argument("marginal bandwidth must lie in (0,1)");
    if (auto* ll = std::get_if<LocalLinearEstimator>(&estimator->kind)) {
      ll->b1 = b1;
      ll->b2 = b2;
    }
  });
}

cl_status cl_estimate(const cl_estimator* estimator,
                      const cl_sample* sample,
                      double h,
                      double u,
                      double v,
                      double* out)
{
  return guarded([&] {
    need(estimator, "estimator");
    need(sample, "sample");
    need(out, "out");
    const PseudoObservations pseudo =
      estimator_pseudo(estimator->kind, estimator->spec, sample->value);
    *out = estimate(estimator->kind, estimator->spec, pseudo, h, u, v);
  });
}

cl_status cl_estimate_grid(const cl_estimator* estimator,
                           const cl_sample* sample,
                           double h,
                           const double* u_points,
                           size_t nu,
                           const double* v_points,
                           size_t nv,
                           double* values)
{
  return guarded([&] {
    need(estimator, "estimator");
    need(sample, "sample");
    need(u_points, "u_points");
    need(v_points, "v_points");
    need(values, "values");
    const SurfaceGrid grid = estimate_on_grid(estimator->kind,
                                              estimator->spec,
                                              sample->value,
                                              h,
                                              std::span<const double>(u_points, nu),
                                              std::span<const double>(v_points, nv));
    std::copy(grid.values.begin(), grid.values.end(), values);
  });
}

void cl_estimator_destroy(cl_estimator* estimator)
{
  delete estimator;
}

cl_status cl_rn(size_t n, double* out)
{
  return guarded([&] {
    need(out, "out");
    *out = rn(n);
  });
}

cl_status cl_band_halfwidth(size_t n, double epsilon, double* out)
{
  return guarded([&] {
    need(out, "out");
    *out = band_halfwidth(n, epsilon);
  });
}

cl_status cl_verify_gi(const char* kernel,
                       const char* phi,
                       size_t probes,
                       uint64_t seed,
                       double* max_abs_g,
                       double* kappa,
                       int* pass)
{
  return guarded([&] {
    const GiResult r = verify_gi(kernel_from_name(text(kernel, "kernel")),
                                 transformation_from_name(text(phi, "phi")),
                                 probes,
                                 seed);
    if (max_abs_g)
      *max_abs_g = r.max_abs_g;
    if (kappa)
      *kappa = r.kappa;
    if (pass)
      *pass = r.pass ? 1 : 0;
  });
}

cl_status cl_verify_gii(const char* kernel,
                        const char* phi,
                        const cl_copula* copula,
                        double h,
                        size_t draws,
                        uint64_t seed,
                        double* max_estimate,
                        double* c0_times_h,
                        int* pass)
{
  return guarded([&] {
    need(copula, "copula");
    const GiiResult r = verify_gii(kernel_from_name(text(kernel, "kernel")),
                                   transformation_from_name(text(phi, "phi")),
                                   copula->value,
                                   h,
                                   draws,
                                   seed);
    if (max_estimate)
      *max_estimate = r.max_estimate;
    if (c0_times_h)
      *c0_times_h = r.c0_times_h;
    if (pass)
      *pass = r.pass ? 1 : 0;
  });
}

cl_status cl_config_create(cl_config** out)
{
  return guarded([&] {
    need(out, "out");
    *out = new cl_config{};
  });
}

cl_status cl_config_parse(const char* config_text, cl_config** out)
{
  return guarded([&] {
    need(out, "out");
    *out = new cl_config{ parse_config(text(config_text, "text")) };
  });
}

cl_status cl_config_set(cl_config* config, const char* key, const char* value)
{
  return guarded([&] {
    need(config, "config");
    set_config_value(config->value, text(key, "key"), text(value, "value"));
  });
}

cl_status cl_config_serialize(const cl_config* config, char* buffer, size_t cap, size_t* needed)
{
  std::string s;
  const cl_status st = guarded([&] {
    need(config, "config");
    s = serialize_config(config->value);
  });
  if (st != CL_OK)
    return st;
  if (needed)
    *needed = s.size() + 1;
  if (buffer == nullptr || cap < s.size() + 1)
    return fail(CL_BUFFER_TOO_SMALL, "buffer too small for serialized config");
  std::memcpy(buffer, s.c_str(), s.size() + 1);
  return CL_OK;
}

cl_status cl_run(const cl_config* config)
{
  return guarded([&] {
    need(config, "config");
    run(config->value);
  });
}

void cl_config_destroy(cl_config* config)
{
  delete config;
}

} // extern "C"
