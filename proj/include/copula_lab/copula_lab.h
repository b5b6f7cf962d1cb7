#ifndef COPULA_LAB_H
#define COPULA_LAB_H

/*
 * C interface to copula_lab. Every call returns a cl_status; results go
 * through out-parameters. On failure cl_last_error_message() describes the
 * most recent error raised on the calling thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CL_API __declspec(dllexport)
#else
#define CL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cl_status
{
  CL_OK = 0,
  CL_INVALID_ARGUMENT = 1, /* precondition violated */
  CL_DOMAIN_ERROR = 2,     /* numerically degenerate configuration */
  CL_PARSE_ERROR = 3,      /* malformed CSV or config text */
  CL_IO_ERROR = 4,
  CL_BUFFER_TOO_SMALL = 5,
  CL_INTERNAL_ERROR = 6
} cl_status;

typedef enum cl_transform_mode
{
  CL_TRANSFORM_FORWARD = 0,
  CL_TRANSFORM_INVERSE = 1,
  CL_TRANSFORM_DERIVATIVE = 2
} cl_transform_mode;

typedef enum cl_partial_wrt
{
  CL_PARTIAL_U = 0,
  CL_PARTIAL_V = 1
} cl_partial_wrt;

typedef struct cl_sample cl_sample;
typedef struct cl_pseudo cl_pseudo;
typedef struct cl_copula cl_copula;
typedef struct cl_estimator cl_estimator;
typedef struct cl_config cl_config;

CL_API const char* cl_status_name(cl_status status);
CL_API const char* cl_last_error_message(void);
/* 1-based line of the last parse error, 0 otherwise. */
CL_API size_t cl_last_error_line(void);

/* samples */
CL_API cl_status cl_sample_create(const double* xs, const double* ys, size_t n, cl_sample** out);
CL_API cl_status cl_sample_parse_csv(const char* text, cl_sample** out);
CL_API cl_status cl_sample_read_csv(const char* path, cl_sample** out);
CL_API size_t cl_sample_size(const cl_sample* sample);
CL_API int cl_sample_has_ties(const cl_sample* sample);
CL_API void cl_sample_destroy(cl_sample* sample);

CL_API cl_status cl_ecdf(const double* data, size_t n, double x, double* out);
CL_API cl_status cl_generalized_inverse(const double* data, size_t n, double u, double* out);
CL_API cl_status cl_empirical_copula(const cl_sample* sample, double u, double v, double* out);

/* pseudo-observations */
CL_API cl_status cl_pseudo_ranks(const cl_sample* sample, cl_pseudo** out);
CL_API cl_status cl_pseudo_smoothed(const cl_sample* sample,
                                    const char* kernel,
                                    double b1,
                                    double b2,
                                    cl_pseudo** out);
CL_API size_t cl_pseudo_size(const cl_pseudo* pseudo);
/* Copies U and V into caller buffers of cl_pseudo_size() entries. */
CL_API cl_status cl_pseudo_values(const cl_pseudo* pseudo, double* us, double* vs);
CL_API void cl_pseudo_destroy(cl_pseudo* pseudo);

/* kernels and transformations, selected by name */
CL_API cl_status cl_kernel_eval(const char* kernel, double t, double* out);
CL_API cl_status cl_integrated_kernel(const char* kernel, double x, double* out);
CL_API cl_status cl_boundary_moment(const char* kernel, double w, double h, int j, double* out);
CL_API cl_status cl_local_linear_kernel(const char* kernel, double w, double h, double t, double* out);
CL_API cl_status cl_transform(const char* phi, cl_transform_mode mode, double t, double* out);

/* parametric copulas; parameter is ignored for "independence" */
CL_API cl_status cl_copula_create(const char* name, double parameter, cl_copula** out);
CL_API cl_status cl_copula_cdf(const cl_copula* copula, double u, double v, double* out);
CL_API cl_status cl_copula_partial(const cl_copula* copula,
                                   cl_partial_wrt wrt,
                                   double u,
                                   double v,
                                   double* out);
/* n exact draws seeded by `seed`, written to caller buffers. */
CL_API cl_status cl_copula_sample(const cl_copula* copula,
                                  size_t n,
                                  uint64_t seed,
                                  double* us,
                                  double* vs);
CL_API void cl_copula_destroy(cl_copula* copula);

/* estimators: code "t", "ll" or "mr" */
CL_API cl_status cl_estimator_create(const char* code,
                                     const char* phi,
                                     const char* kernel,
                                     cl_estimator** out);
/* Marginal smoothing bandwidths for "ll"; ignored by the other codes. */
CL_API cl_status cl_estimator_set_marginal_bandwidths(cl_estimator* estimator, double b1, double b2);
CL_API cl_status cl_estimate(const cl_estimator* estimator,
                             const cl_sample* sample,
                             double h,
                             double u,
                             double v,
                             double* out);
/* Row-major values (nu * nv entries) on the lattice u_points x v_points. */
CL_API cl_status cl_estimate_grid(const cl_estimator* estimator,
                                  const cl_sample* sample,
                                  double h,
                                  const double* u_points,
                                  size_t nu,
                                  const double* v_points,
                                  size_t nv,
                                  double* values);
CL_API void cl_estimator_destroy(cl_estimator* estimator);

/* deviation statistics */
CL_API cl_status cl_rn(size_t n, double* out);
CL_API cl_status cl_band_halfwidth(size_t n, double epsilon, double* out);
CL_API cl_status cl_verify_gi(const char* kernel,
                              const char* phi,
                              size_t probes,
                              uint64_t seed,
                              double* max_abs_g,
                              double* kappa,
                              int* pass);
CL_API cl_status cl_verify_gii(const char* kernel,
                               const char* phi,
                               const cl_copula* copula,
                               double h,
                               size_t draws,
                               uint64_t seed,
                               double* max_estimate,
                               double* c0_times_h,
                               int* pass);

/* run configuration; keys match the CLI flags without dashes */
CL_API cl_status cl_config_create(cl_config** out);
CL_API cl_status cl_config_parse(const char* text, cl_config** out);
CL_API cl_status cl_config_set(cl_config* config, const char* key, const char* value);
/* Writes the canonical key=value form including the terminating NUL.
 * *needed receives the required size; CL_BUFFER_TOO_SMALL if cap is short. */
CL_API cl_status cl_config_serialize(const cl_config* config, char* buffer, size_t cap, size_t* needed);
CL_API cl_status cl_run(const cl_config* config);
CL_API void cl_config_destroy(cl_config* config);

#ifdef __cplusplus
}
#endif

#endif
