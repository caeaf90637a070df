// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sdese/complex_grid.hpp"
#include "sdese/random.hpp"

namespace sdese {

inline constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
  double energy() const noexcept;
};

/// Analysis window of `window_size` samples (periodic Hann), transformed
/// with an FFT of the same length. The one-sided spectrum of a 510-point
/// FFT has exactly 256 bins, the last one being Nyquist.
struct StftConfig {
  int window_size = 510;
  int hop = 128;

  int bins() const noexcept { return window_size / 2 + 1; }
  void validate() const;
};

std::vector<double> periodic_hann(int n);

// Frames k cover samples [k*hop, k*hop + window_size); no padding.
std::size_t frame_count(std::size_t length, const StftConfig& cfg);
std::size_t natural_length(std::size_t frames, const StftConfig& cfg);

ComplexGrid stft(const Waveform& w, const StftConfig& cfg = {});

/// Weighted overlap-add inverse with squared-window normalisation. Samples
/// not covered by any frame, or whose window-square sum is below 1e-8 of its
/// peak, are returned as zero.
Waveform istft(const ComplexGrid& grid, const StftConfig& cfg, std::size_t length);

struct CompressionConfig {
  double beta = 0.15;
  double alpha = 0.5;

  void validate() const;
};

// v -> beta |v|^alpha e^{i arg v}
ComplexGrid compress(const ComplexGrid& grid, const CompressionConfig& cfg = {});
// u -> (|u| / beta)^{1/alpha} e^{i arg u}
ComplexGrid decompress(const ComplexGrid& grid, const CompressionConfig& cfg = {});

struct Mixture {
  Waveform y;
  Waveform scaled_noise;
};

/// y = s + g n with g chosen so that 10 log10(|s|^2 / |g n|^2) = snr_db.
/// A longer noise is cropped at a random offset drawn from rng.
Mixture mix_at_snr(const Waveform& s, const Waveform& n, double snr_db, RandomSource& rng);

enum class WavEncoding { pcm16, float32 };

// Mono 16 kHz RIFF/WAVE, PCM16 or IEEE float32.
Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding encoding = WavEncoding::float32);

// One line per row (frequency bin): re,im pairs separated by commas.
void write_grid_csv(const ComplexGrid& grid, std::ostream& out);

}  // namespace sdese
