// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdese/metrics.hpp"
#include "sdese/score.hpp"
#include "sdese/sde.hpp"
#include "sdese/signal.hpp"
#include "sdese/solvers.hpp"

namespace sdese {

enum class SweepKind { variance, trsp, steps };
enum class TaskKind { gaussian_toy, wav_pair };

std::string_view to_string(SweepKind kind) noexcept;
std::string_view to_string(TaskKind kind) noexcept;

/// Synthetic STFT-shaped task with a known posterior.
///
/// Clean coefficients S ~ N_C(0, speech_var), noise N ~ N_C(0, noise_var)
/// with noise_var = speech_var 10^{-snr_db/10}, Y = S + N. The score is the
/// exact score of the posterior X_0 | Y ~ N_C(W Y, W noise_var) with
/// W = speech_var / (speech_var + noise_var). Each configuration is solved
/// `repeats` times and metrics are averaged.
struct GaussianToyConfig {
  int bins = 256;
  int frames = 64;
  double speech_var = 1.0;
  double snr_db = 0.0;
  int repeats = 8;
};

struct GaussianToy {
  ComplexGrid s;
  ComplexGrid n;
  ComplexGrid y;
  ComplexGrid posterior_mean;
  double posterior_var = 0.0;
};

GaussianToy make_gaussian_toy(const GaussianToyConfig& cfg, std::uint64_t seed);

// Builds a score for the compressed mixture spectrogram of a wav_pair task.
using ScoreFactory = std::function<ScoreFunction(const SdeSpec& spec, const ComplexGrid& y)>;

struct WavPairConfig {
  std::filesystem::path clean;
  std::filesystem::path noisy;
  ScoreFactory score_factory;  // required to solve on audio
  CompressionConfig compression;
};

struct SweepPlan {
  std::vector<SdeSpec> sdes;
  // Reverse settings for variance sweeps; t_rsp values above T clamp to T.
  std::vector<SamplerConfig> samplers = {SamplerConfig{}};
  // Reverse start points for t_rsp sweeps, solved with step trsp_dt.
  std::vector<double> t_rsp_grid = {1.0, 0.91, 0.82, 0.73, 0.64, 0.55, 0.46, 0.37, 0.28, 0.19};
  double trsp_dt = 1.0 / 30.0;
  // Step counts for robustness sweeps; the first entry is the reference.
  std::vector<int> step_counts = {60, 30};
  TaskKind task = TaskKind::gaussian_toy;
  GaussianToyConfig toy;
  WavPairConfig wav;
  std::uint64_t seed = 0;
  SegmentOptions segments;
  StftConfig stft;
  MetricAdapter external;

  void validate() const;
};

struct SweepRow {
  SweepKind sweep = SweepKind::variance;
  SdeSpec sde = SdeSpec::bbed();
  SamplerConfig sampler;
  double na_db = 0.0;
  double proxy_db = 0.0;
  double residual = 0.0;
  double prior_mismatch = 0.0;
  // (residual - residual of the reference row) / reference residual, where
  // the reference is t_rsp = T (trsp sweeps) or the first step count
  // (step sweeps). Zero for variance sweeps and reference rows.
  double relative_change = 0.0;
  std::optional<double> external_metric;
  std::string status = "ok";
  double wall_seconds = 0.0;

  std::string config_key() const;
};

struct SweepReport {
  SweepKind sweep = SweepKind::variance;
  TaskKind task = TaskKind::gaussian_toy;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<SweepRow> rows;
};

SweepReport run_variance_sweep(const SweepPlan& plan);
SweepReport run_trsp_sweep(const SweepPlan& plan);
SweepReport run_step_robustness(const SweepPlan& plan);
SweepReport run_sweep(const SweepPlan& plan, SweepKind kind);

// One configuration on the toy task; shared by all sweeps.
SweepRow evaluate_toy_row(const GaussianToy& toy, const SdeSpec& spec,
                          const SamplerConfig& sampler, const SweepPlan& plan);

struct WavMetrics {
  double na_db = 0.0;
  double proxy_db = 0.0;
  std::optional<double> external_metric;
};

/// Metrics of an externally produced estimate against clean/noisy audio.
WavMetrics evaluate_wav_estimate(const Waveform& clean, const Waveform& noisy,
                                 const Waveform& enhanced, const StftConfig& stft,
                                 const SegmentOptions& segments, const MetricAdapter& external);

enum class ReportFormat { csv, json };

// Values are written with 6 significant digits; wall time only when
// include_timing is set, so default output is byte-stable.
std::string serialize_report(const SweepReport& report, ReportFormat format,
                             bool include_timing = false);
void emit_report(const SweepReport& report, ReportFormat format,
                 const std::filesystem::path& path, bool include_timing = false);
SweepReport parse_report_json(std::string_view text);

std::string_view csv_header();

SweepPlan parse_plan_json(std::string_view text);
std::string plan_to_json(const SweepPlan& plan);

std::string_view library_version() noexcept;

}  // namespace sdese
