// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/sdese.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "sdese/error.hpp"
#include "sdese/experiments.hpp"
#include "sdese/sde.hpp"
#include "sdese/solvers.hpp"
#include "sdese/special_functions.hpp"

struct sdese_sde {
  sdese::SdeSpec spec;
};

struct sdese_plan {
  sdese::SweepPlan plan;
  bool default_sampler = true;
};

struct sdese_report {
  sdese::SweepReport report;
};

namespace {

thread_local std::string last_error;

sdese_status record(sdese_status status, const char* message) {
  last_error = message;
  return status;
}

// Runs f, translating exceptions into status codes.
template <typename F>
sdese_status guard(F&& f) noexcept {
  try {
    last_error.clear();
    f();
    return SDESE_OK;
  } catch (const sdese::Error& e) {
    return record(static_cast<sdese_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(SDESE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(SDESE_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(SDESE_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) sdese::fail(sdese::ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

sdese::ComplexGrid from_interleaved(const double* v, std::size_t n) {
  sdese::ComplexGrid g(1, n);
  for (std::size_t i = 0; i < n; ++i) g[i] = {v[2 * i], v[2 * i + 1]};
  return g;
}

sdese_sde_params to_params(const sdese::SdeSpec& s) {
  return {s.kind() == sdese::SdeKind::ouve ? SDESE_SDE_OUVE : SDESE_SDE_BBED, s.gamma(), s.c(),
          s.k(), s.T()};
}

sdese::SdeSpec from_params(const sdese_sde_params& p) {
  if (p.kind != SDESE_SDE_OUVE && p.kind != SDESE_SDE_BBED) {
    sdese::fail(sdese::ErrorCode::invalid_argument, "unknown SDE kind");
  }
  const sdese::SdeKind kind = p.kind == SDESE_SDE_OUVE ? sdese::SdeKind::ouve : sdese::SdeKind::bbed;
  return {kind, kind == sdese::SdeKind::bbed ? 0.0 : p.gamma, p.c, p.k, p.T};
}

sdese::ReportFormat to_format(sdese_format f) {
  if (f == SDESE_FORMAT_CSV) return sdese::ReportFormat::csv;
  if (f == SDESE_FORMAT_JSON) return sdese::ReportFormat::json;
  sdese::fail(sdese::ErrorCode::invalid_argument, "unknown report format");
}

// The buffer-size failure has its own status; everything else goes through guard.
template <typename F>
sdese_status guard_text(char* buffer, size_t capacity, size_t* needed, F&& make) noexcept {
  std::string text;
  const sdese_status st = guard([&] { text = make(); });
  if (st != SDESE_OK) return st;
  if (needed != nullptr) *needed = text.size() + 1;
  if (buffer == nullptr && capacity == 0) return SDESE_OK;
  if (buffer == nullptr) return record(SDESE_ERR_INVALID_ARGUMENT, "buffer is NULL");
  if (capacity < text.size() + 1) {
    return record(SDESE_ERR_BUFFER_TOO_SMALL,
                  ("buffer of " + std::to_string(capacity) + " bytes, need " +
                   std::to_string(text.size() + 1))
                      .c_str());
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return SDESE_OK;
}

}  // namespace

extern "C" {

const char* sdese_version(void) { return sdese::library_version().data(); }

const char* sdese_last_error(void) { return last_error.c_str(); }

const char* sdese_status_name(sdese_status status) {
  switch (status) {
    case SDESE_OK: return "ok";
    case SDESE_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case SDESE_ERR_INTERNAL: return "internal";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 9) return sdese::token(static_cast<sdese::ErrorCode>(code));
  return "unknown";
}

sdese_status sdese_sde_create(const sdese_sde_params* params, sdese_sde** out) {
  return guard([&] {
    need(params, "params");
    need(out, "out");
    *out = new sdese_sde{from_params(*params)};
  });
}

sdese_status sdese_sde_create_default(sdese_sde_kind kind, sdese_sde** out) {
  return guard([&] {
    need(out, "out");
    if (kind != SDESE_SDE_OUVE && kind != SDESE_SDE_BBED) {
      sdese::fail(sdese::ErrorCode::invalid_argument, "unknown SDE kind");
    }
    *out = new sdese_sde{sdese::SdeSpec::defaults(kind == SDESE_SDE_OUVE ? sdese::SdeKind::ouve
                                                                         : sdese::SdeKind::bbed)};
  });
}

sdese_status sdese_sde_parse_config(const char* text, sdese_sde** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new sdese_sde{sdese::SdeSpec::from_config(text)};
  });
}

sdese_status sdese_sde_write_config(const sdese_sde* sde, char* buffer, size_t capacity,
                                    size_t* needed) {
  return guard_text(buffer, capacity, needed, [&] {
    need(sde, "sde");
    return sde->spec.to_config();
  });
}

void sdese_sde_destroy(sdese_sde* sde) { delete sde; }

sdese_status sdese_sde_get(const sdese_sde* sde, sdese_sde_params* out) {
  return guard([&] {
    need(sde, "sde");
    need(out, "out");
    *out = to_params(sde->spec);
  });
}

sdese_status sdese_sde_variance(const sdese_sde* sde, double t, double* out) {
  return guard([&] {
    need(sde, "sde");
    need(out, "out");
    if (!(t >= 0.0 && t <= sde->spec.T())) {
      sdese::fail(sdese::ErrorCode::domain, "t outside [0, T]");
    }
    *out = sdese::kernel_variance(sde->spec, t);
  });
}

sdese_status sdese_sde_diffusion(const sdese_sde* sde, double t, double* out) {
  return guard([&] {
    need(sde, "sde");
    need(out, "out");
    *out = sdese::diffusion(sde->spec, t);
  });
}

sdese_status sdese_sde_mean_coefficients(const sdese_sde* sde, double t, double* a, double* b) {
  return guard([&] {
    need(sde, "sde");
    need(a, "a");
    need(b, "b");
    const sdese::MeanCoefficients m = sdese::mean_coefficients(sde->spec, t);
    *a = m.a;
    *b = m.b;
  });
}

sdese_status sdese_sde_prior_mismatch(const sdese_sde* sde, const double* x0, const double* y,
                                      size_t n, double* out) {
  return guard([&] {
    need(sde, "sde");
    need(x0, "x0");
    need(y, "y");
    need(out, "out");
    if (n == 0) sdese::fail(sdese::ErrorCode::invalid_argument, "n must be > 0");
    *out = sdese::prior_mismatch(sde->spec, from_interleaved(x0, n), from_interleaved(y, n));
  });
}

sdese_status sdese_expint_ei(double x, double* out) {
  return guard([&] {
    need(out, "out");
    *out = sdese::expint_ei(x);
  });
}

sdese_status sdese_kernel_check(const sdese_sde* sde, const double x0[2], const double y[2],
                                const double* times, size_t n_times, size_t n_paths, double dt,
                                uint64_t seed, sdese_kernel_stats* out) {
  return guard([&] {
    need(sde, "sde");
    need(x0, "x0");
    need(y, "y");
    need(times, "times");
    need(out, "out");
    const sdese::ComplexGrid gx = from_interleaved(x0, 1);
    const sdese::ComplexGrid gy = from_interleaved(y, 1);
    sdese::RandomSource rng(seed);
    const std::vector<sdese::KernelStats> stats = sdese::monte_carlo_kernel_stats(
        sde->spec, gx, gy, std::span<const double>(times, n_times), n_paths, dt, rng);
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const sdese::KernelMoments m = sdese::kernel_moments(sde->spec, gx, gy, stats[i].t);
      out[i] = {stats[i].t,           stats[i].mean[0].real(), stats[i].mean[0].imag(),
                stats[i].mean_stderr, stats[i].var,            stats[i].var_stderr,
                m.mean[0].real(),     m.mean[0].imag(),        m.std * m.std,
                stats[i].n_paths};
    }
  });
}

sdese_status sdese_plan_create(sdese_plan** out) {
  return guard([&] {
    need(out, "out");
    *out = new sdese_plan{};
  });
}

sdese_status sdese_plan_from_json(const char* text, sdese_plan** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new sdese_plan{sdese::parse_plan_json(text), false};
  });
}

sdese_status sdese_plan_to_json(const sdese_plan* plan, char* buffer, size_t capacity,
                                size_t* needed) {
  return guard_text(buffer, capacity, needed, [&] {
    need(plan, "plan");
    return sdese::plan_to_json(plan->plan);
  });
}

void sdese_plan_destroy(sdese_plan* plan) { delete plan; }

sdese_status sdese_plan_clear_sdes(sdese_plan* plan) {
  return guard([&] {
    need(plan, "plan");
    plan->plan.sdes.clear();
  });
}

sdese_status sdese_plan_add_sde(sdese_plan* plan, const sdese_sde* sde) {
  return guard([&] {
    need(plan, "plan");
    need(sde, "sde");
    plan->plan.sdes.push_back(sde->spec);
  });
}

sdese_status sdese_plan_clear_samplers(sdese_plan* plan) {
  return guard([&] {
    need(plan, "plan");
    plan->plan.samplers.clear();
    plan->default_sampler = false;
  });
}

sdese_status sdese_plan_add_sampler(sdese_plan* plan, const sdese_sampler_params* sampler) {
  return guard([&] {
    need(plan, "plan");
    need(sampler, "sampler");
    if (plan->default_sampler) {
      plan->plan.samplers.clear();
      plan->default_sampler = false;
    }
    plan->plan.samplers.push_back(
        {sampler->t_rsp, sampler->n_steps, sampler->seed, sampler->denoise_final != 0});
  });
}

sdese_status sdese_plan_set_seed(sdese_plan* plan, uint64_t seed) {
  return guard([&] {
    need(plan, "plan");
    plan->plan.seed = seed;
  });
}

sdese_status sdese_plan_set_toy(sdese_plan* plan, int bins, int frames, double speech_var,
                                double snr_db, int repeats) {
  return guard([&] {
    need(plan, "plan");
    plan->plan.task = sdese::TaskKind::gaussian_toy;
    plan->plan.toy = {bins, frames, speech_var, snr_db, repeats};
  });
}

sdese_status sdese_plan_set_trsp_grid(sdese_plan* plan, const double* t_rsp, size_t n, double dt) {
  return guard([&] {
    need(plan, "plan");
    need(t_rsp, "t_rsp");
    plan->plan.t_rsp_grid.assign(t_rsp, t_rsp + n);
    plan->plan.trsp_dt = dt;
  });
}

sdese_status sdese_plan_set_step_counts(sdese_plan* plan, const int* counts, size_t n) {
  return guard([&] {
    need(plan, "plan");
    need(counts, "counts");
    plan->plan.step_counts.assign(counts, counts + n);
  });
}

sdese_status sdese_plan_set_external_metric(sdese_plan* plan, const char* executable,
                                            const char* const* args, size_t n_args,
                                            const char* stdout_regex) {
  return guard([&] {
    need(plan, "plan");
    need(executable, "executable");
    sdese::MetricAdapter::Config cfg;
    cfg.executable = executable;
    if (n_args > 0) {
      need(args, "args");
      cfg.args.assign(args, args + n_args);
    }
    if (stdout_regex != nullptr) cfg.stdout_regex = stdout_regex;
    plan->plan.external = sdese::MetricAdapter(std::move(cfg));
  });
}

sdese_status sdese_run_sweep(const sdese_plan* plan, sdese_sweep_kind kind, sdese_report** out) {
  return guard([&] {
    need(plan, "plan");
    need(out, "out");
    sdese::SweepKind k;
    switch (kind) {
      case SDESE_SWEEP_VARIANCE: k = sdese::SweepKind::variance; break;
      case SDESE_SWEEP_TRSP: k = sdese::SweepKind::trsp; break;
      case SDESE_SWEEP_STEPS: k = sdese::SweepKind::steps; break;
      default: sdese::fail(sdese::ErrorCode::invalid_argument, "unknown sweep kind");
    }
    *out = new sdese_report{sdese::run_sweep(plan->plan, k)};
  });
}

sdese_status sdese_report_parse_json(const char* text, sdese_report** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new sdese_report{sdese::parse_report_json(text)};
  });
}

void sdese_report_destroy(sdese_report* report) { delete report; }

size_t sdese_report_row_count(const sdese_report* report) {
  return report == nullptr ? 0 : report->report.rows.size();
}

sdese_status sdese_report_get_row(const sdese_report* report, size_t index, sdese_row* out) {
  return guard([&] {
    need(report, "report");
    need(out, "out");
    if (index >= report->report.rows.size()) {
      sdese::fail(sdese::ErrorCode::invalid_argument, "row index out of range");
    }
    const sdese::SweepRow& r = report->report.rows[index];
    out->sweep = static_cast<sdese_sweep_kind>(static_cast<int>(r.sweep));
    out->sde = to_params(r.sde);
    out->sampler = {r.sampler.t_rsp, r.sampler.n_steps, r.sampler.seed,
                    r.sampler.denoise_final ? 1 : 0};
    out->na_db = r.na_db;
    out->proxy_db = r.proxy_db;
    out->residual = r.residual;
    out->prior_mismatch = r.prior_mismatch;
    out->relative_change = r.relative_change;
    out->has_external_metric = r.external_metric.has_value() ? 1 : 0;
    out->external_metric = r.external_metric.value_or(std::nan(""));
    out->wall_seconds = r.wall_seconds;
    out->status = r.status.c_str();
  });
}

sdese_status sdese_report_serialize(const sdese_report* report, sdese_format format,
                                    int include_timing, char* buffer, size_t capacity,
                                    size_t* needed) {
  return guard_text(buffer, capacity, needed, [&] {
    need(report, "report");
    return sdese::serialize_report(report->report, to_format(format), include_timing != 0);
  });
}

sdese_status sdese_report_write(const sdese_report* report, sdese_format format, const char* path,
                                int include_timing) {
  return guard([&] {
    need(report, "report");
    need(path, "path");
    sdese::emit_report(report->report, to_format(format), path, include_timing != 0);
  });
}

sdese_status sdese_wav_metrics(const char* clean_path, const char* noisy_path,
                               const char* enhanced_path, const sdese_plan* plan,
                               sdese_wav_result* out) {
  return guard([&] {
    need(clean_path, "clean_path");
    need(noisy_path, "noisy_path");
    need(enhanced_path, "enhanced_path");
    need(out, "out");
    const sdese::SweepPlan defaults;
    const sdese::SweepPlan& p = plan != nullptr ? plan->plan : defaults;
    const sdese::WavMetrics m = sdese::evaluate_wav_estimate(
        sdese::read_wav(clean_path), sdese::read_wav(noisy_path), sdese::read_wav(enhanced_path),
        p.stft, p.segments, p.external);
    out->na_db = m.na_db;
    out->proxy_db = m.proxy_db;
    out->has_external_metric = m.external_metric.has_value() ? 1 : 0;
    out->external_metric = m.external_metric.value_or(std::nan(""));
  });
}

}  // extern "C"
