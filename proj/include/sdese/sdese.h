/* Copyright 2026 The sdese Authors
 * License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
 *
 * C interface of the sdese shared library.
 *
 * Every fallible function returns an sdese_status; on failure a message is
 * available from sdese_last_error() on the same thread until the next call.
 * Complex arrays are interleaved (re, im) doubles. Functions that produce
 * text copy it into a caller buffer of `capacity` bytes (including the
 * terminating NUL) and report the required size through `needed`; a short
 * buffer yields SDESE_ERR_BUFFER_TOO_SMALL and an untouched buffer.
 */
#ifndef SDESE_SDESE_H_
#define SDESE_SDESE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SDESE_BUILDING_LIBRARY)
#define SDESE_API __attribute__((visibility("default")))
#else
#define SDESE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdese_status {
  SDESE_OK = 0,
  SDESE_ERR_INVALID_ARGUMENT = 1,
  SDESE_ERR_SHAPE_MISMATCH = 2,
  SDESE_ERR_DOMAIN = 3,
  SDESE_ERR_OVERFLOW = 4,
  SDESE_ERR_SINGULARITY = 5,
  SDESE_ERR_DIVERGED = 6,
  SDESE_ERR_NOT_CONFIGURED = 7,
  SDESE_ERR_PARSE = 8,
  SDESE_ERR_IO = 9,
  SDESE_ERR_BUFFER_TOO_SMALL = 10,
  SDESE_ERR_INTERNAL = 11
} sdese_status;

typedef enum sdese_sde_kind { SDESE_SDE_OUVE = 0, SDESE_SDE_BBED = 1 } sdese_sde_kind;

typedef enum sdese_sweep_kind {
  SDESE_SWEEP_VARIANCE = 0,
  SDESE_SWEEP_TRSP = 1,
  SDESE_SWEEP_STEPS = 2
} sdese_sweep_kind;

typedef enum sdese_format { SDESE_FORMAT_CSV = 0, SDESE_FORMAT_JSON = 1 } sdese_format;

typedef struct sdese_sde sdese_sde;
typedef struct sdese_plan sdese_plan;
typedef struct sdese_report sdese_report;

typedef struct sdese_sde_params {
  sdese_sde_kind kind;
  double gamma; /* OUVE stiffness; ignored (stored as 0) for BBED */
  double c;
  double k;
  double T;
} sdese_sde_params;

typedef struct sdese_sampler_params {
  double t_rsp;
  int n_steps;
  uint64_t seed;
  int denoise_final;
} sdese_sampler_params;

typedef struct sdese_row {
  sdese_sweep_kind sweep;
  sdese_sde_params sde;
  sdese_sampler_params sampler;
  double na_db;
  double proxy_db;
  double residual;
  double prior_mismatch;
  double relative_change;
  int has_external_metric;
  double external_metric;
  double wall_seconds;
  /* Owned by the report; valid until it is destroyed. */
  const char* status;
} sdese_row;

typedef struct sdese_kernel_stats {
  double t;
  double mc_mean_re;
  double mc_mean_im;
  double mean_stderr;
  double mc_var;
  double var_stderr;
  double oracle_mean_re;
  double oracle_mean_im;
  double oracle_var;
  size_t n_paths;
} sdese_kernel_stats;

typedef struct sdese_wav_result {
  double na_db;
  double proxy_db;
  int has_external_metric;
  double external_metric;
} sdese_wav_result;

SDESE_API const char* sdese_version(void);
SDESE_API const char* sdese_last_error(void);
SDESE_API const char* sdese_status_name(sdese_status status);

/* SDE handles */
SDESE_API sdese_status sdese_sde_create(const sdese_sde_params* params, sdese_sde** out);
SDESE_API sdese_status sdese_sde_create_default(sdese_sde_kind kind, sdese_sde** out);
/* "key = value" lines with keys kind, gamma, c, k, T; '#' starts a comment. */
SDESE_API sdese_status sdese_sde_parse_config(const char* text, sdese_sde** out);
SDESE_API sdese_status sdese_sde_write_config(const sdese_sde* sde, char* buffer, size_t capacity,
                                              size_t* needed);
SDESE_API void sdese_sde_destroy(sdese_sde* sde);
SDESE_API sdese_status sdese_sde_get(const sdese_sde* sde, sdese_sde_params* out);

SDESE_API sdese_status sdese_sde_variance(const sdese_sde* sde, double t, double* out);
SDESE_API sdese_status sdese_sde_diffusion(const sdese_sde* sde, double t, double* out);
/* Kernel mean is a*x0 + b*y. */
SDESE_API sdese_status sdese_sde_mean_coefficients(const sdese_sde* sde, double t, double* a,
                                                   double* b);
/* a(T) * ||x0 - y|| over n complex values. */
SDESE_API sdese_status sdese_sde_prior_mismatch(const sdese_sde* sde, const double* x0,
                                                const double* y, size_t n, double* out);

SDESE_API sdese_status sdese_expint_ei(double x, double* out);

/* Forward Euler-Maruyama Monte-Carlo statistics of a scalar process started
 * at x0 with condition y, against the closed-form kernel, at each of the
 * n_times checkpoints (multiples of dt). */
SDESE_API sdese_status sdese_kernel_check(const sdese_sde* sde, const double x0[2],
                                          const double y[2], const double* times, size_t n_times,
                                          size_t n_paths, double dt, uint64_t seed,
                                          sdese_kernel_stats* out);

/* Sweep plans. A new plan has no SDEs and one default sampler; the first
 * sdese_plan_add_sampler call replaces the default. Samplers loaded from JSON
 * are kept; call sdese_plan_clear_samplers to replace them. */
SDESE_API sdese_status sdese_plan_create(sdese_plan** out);
SDESE_API sdese_status sdese_plan_from_json(const char* text, sdese_plan** out);
SDESE_API sdese_status sdese_plan_to_json(const sdese_plan* plan, char* buffer, size_t capacity,
                                          size_t* needed);
SDESE_API void sdese_plan_destroy(sdese_plan* plan);
SDESE_API sdese_status sdese_plan_clear_sdes(sdese_plan* plan);
SDESE_API sdese_status sdese_plan_add_sde(sdese_plan* plan, const sdese_sde* sde);
SDESE_API sdese_status sdese_plan_clear_samplers(sdese_plan* plan);
SDESE_API sdese_status sdese_plan_add_sampler(sdese_plan* plan,
                                              const sdese_sampler_params* sampler);
SDESE_API sdese_status sdese_plan_set_seed(sdese_plan* plan, uint64_t seed);
SDESE_API sdese_status sdese_plan_set_toy(sdese_plan* plan, int bins, int frames,
                                          double speech_var, double snr_db, int repeats);
SDESE_API sdese_status sdese_plan_set_trsp_grid(sdese_plan* plan, const double* t_rsp,
                                                size_t n, double dt);
SDESE_API sdese_status sdese_plan_set_step_counts(sdese_plan* plan, const int* counts, size_t n);
/* args may contain {ref} and {deg}; regex NULL keeps the default number
 * pattern. */
SDESE_API sdese_status sdese_plan_set_external_metric(sdese_plan* plan, const char* executable,
                                                      const char* const* args, size_t n_args,
                                                      const char* stdout_regex);

SDESE_API sdese_status sdese_run_sweep(const sdese_plan* plan, sdese_sweep_kind kind,
                                       sdese_report** out);

/* Reports */
SDESE_API sdese_status sdese_report_parse_json(const char* text, sdese_report** out);
SDESE_API void sdese_report_destroy(sdese_report* report);
SDESE_API size_t sdese_report_row_count(const sdese_report* report);
SDESE_API sdese_status sdese_report_get_row(const sdese_report* report, size_t index,
                                            sdese_row* out);
SDESE_API sdese_status sdese_report_serialize(const sdese_report* report, sdese_format format,
                                              int include_timing, char* buffer, size_t capacity,
                                              size_t* needed);
SDESE_API sdese_status sdese_report_write(const sdese_report* report, sdese_format format,
                                          const char* path, int include_timing);

/* Metrics of an enhanced WAV against clean and noisy WAVs (mono, 16 kHz).
 * STFT, segmentation and external metric settings come from `plan`, or the
 * defaults when plan is NULL. */
SDESE_API sdese_status sdese_wav_metrics(const char* clean_path, const char* noisy_path,
                                         const char* enhanced_path, const sdese_plan* plan,
                                         sdese_wav_result* out);

#ifdef __cplusplus
}
#endif

#endif /* SDESE_SDESE_H_ */
