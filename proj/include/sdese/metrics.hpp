// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "sdese/complex_grid.hpp"
#include "sdese/signal.hpp"

namespace sdese {

struct GainOptions {
  // Cells with |y| < eps_rel * max|y| pass through with gain 1.
  double eps_rel = 1e-8;
  double g_max = 100.0;
};

struct GainFunction {
  ComplexGrid values;
  // Number of cells where a guard (pass-through or magnitude cap) applied.
  std::size_t guarded_cells = 0;
};

GainFunction gain_function(const ComplexGrid& s_hat, const ComplexGrid& y,
                           const GainOptions& options = {});

struct FilteredComponents {
  Waveform s_tilde;
  Waveform n_tilde;
};

// s~ = istft(G . S), n~ = istft(G . (Y - S)). length 0 means the natural
// length of the grid.
FilteredComponents filtered_components(const GainFunction& gain, const ComplexGrid& s,
                                       const ComplexGrid& y, const StftConfig& cfg,
                                       std::size_t length = 0);

struct SegmentOptions {
  std::size_t seg_len = 512;
  double floor_db = -30.0;
  double ceil_db = 60.0;
  // Reference segments below this fraction of the mean segment energy are
  // skipped.
  double silence_rel = 1e-10;
};

/// Segmental noise-to-filtered-noise ratio in dB, averaged over non-silent
/// segments of n. Only full segments are used unless the signal is shorter
/// than one segment.
double noise_attenuation(const Waveform& n, const Waveform& n_tilde,
                         const SegmentOptions& options = {});

/// Segmental SDR of s_tilde against the reference s, same segmentation.
double speech_quality_proxy(const Waveform& s_tilde, const Waveform& s,
                            const SegmentOptions& options = {});

/// Runs an external scoring tool, e.g. a wideband PESQ binary.
///
/// The reference and degraded signals are written to temporary 16 kHz WAV
/// files; `{ref}` and `{deg}` in `args` are replaced by their paths. The
/// first capture group of `stdout_regex` in the tool's output is parsed as
/// the score. Calls on one adapter are serialised.
class MetricAdapter {
 public:
  struct Config {
    std::string executable;
    std::vector<std::string> args = {"{ref}", "{deg}"};
    std::string stdout_regex = R"(([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))";
  };

  MetricAdapter() = default;
  explicit MetricAdapter(Config config) : config_(std::move(config)) {}
  MetricAdapter(const MetricAdapter& other) : config_(other.config_) {}
  MetricAdapter& operator=(const MetricAdapter& other) {
    config_ = other.config_;
    return *this;
  }

  bool configured() const noexcept { return !config_.executable.empty(); }
  const Config& config() const noexcept { return config_; }

  double evaluate(const Waveform& ref, const Waveform& deg) const;

 private:
  Config config_;
  mutable std::mutex mutex_;
};

double external_metric(const MetricAdapter& adapter, const Waveform& ref, const Waveform& deg);

}  // namespace sdese
