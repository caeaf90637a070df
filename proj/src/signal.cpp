// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>

#include "sdese/error.hpp"

namespace sdese {

double Waveform::energy() const noexcept {
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  return acc;
}

void StftConfig::validate() const {
  require(window_size >= 2, ErrorCode::invalid_argument, "StftConfig: window_size must be >= 2");
  require(hop >= 1 && hop < window_size, ErrorCode::invalid_argument,
          "StftConfig: hop must lie in [1, window_size)");
}

std::vector<double> periodic_hann(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

std::size_t frame_count(std::size_t length, const StftConfig& cfg) {
  const auto window = static_cast<std::size_t>(cfg.window_size);
  if (length < window) return 0;
  return 1 + (length - window) / static_cast<std::size_t>(cfg.hop);
}

std::size_t natural_length(std::size_t frames, const StftConfig& cfg) {
  if (frames == 0) return 0;
  return (frames - 1) * static_cast<std::size_t>(cfg.hop) +
         static_cast<std::size_t>(cfg.window_size);
}

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

// Real <-> one-sided complex transform of one window length, with its own
// aligned buffers.
class RealFft {
 public:
  explicit RealFft(int n)
      : n_(n),
        real_(fftw_alloc_real(static_cast<std::size_t>(n))),
        spec_(fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1))) {
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(n, real_.get(), spec_.get(), FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(n, spec_.get(), real_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* real() { return real_.get(); }
  fftw_complex* spectrum() { return spec_.get(); }
  void forward() { fftw_execute(forward_); }
  void inverse() { fftw_execute(inverse_); }
  int size() const { return n_; }

 private:
  int n_;
  std::unique_ptr<double, FftwDeleter> real_;
  std::unique_ptr<fftw_complex, FftwDeleter> spec_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace

ComplexGrid stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  const std::size_t frames = frame_count(w.size(), cfg);
  if (frames == 0) {
    fail(ErrorCode::invalid_argument, "stft: input of " + std::to_string(w.size()) +
                                          " samples is shorter than one window");
  }
  const std::vector<double> window = periodic_hann(cfg.window_size);
  const auto bins = static_cast<std::size_t>(cfg.bins());
  ComplexGrid out(bins, frames);
  RealFft fft(cfg.window_size);
  for (std::size_t k = 0; k < frames; ++k) {
    const double* frame = w.samples.data() + k * static_cast<std::size_t>(cfg.hop);
    for (std::size_t i = 0; i < window.size(); ++i) fft.real()[i] = frame[i] * window[i];
    fft.forward();
    for (std::size_t f = 0; f < bins; ++f) {
      out(f, k) = {fft.spectrum()[f][0], fft.spectrum()[f][1]};
    }
  }
  return out;
}

Waveform istft(const ComplexGrid& grid, const StftConfig& cfg, std::size_t length) {
  cfg.validate();
  const auto bins = static_cast<std::size_t>(cfg.bins());
  if (grid.rows() != bins) {
    fail(ErrorCode::shape_mismatch, "istft: grid has " + std::to_string(grid.rows()) +
                                        " bins, expected " + std::to_string(bins));
  }
  const std::size_t frames = grid.cols();
  const std::size_t covered = natural_length(frames, cfg);
  const std::vector<double> window = periodic_hann(cfg.window_size);
  std::vector<double> acc(std::max(covered, length), 0.0);
  std::vector<double> norm(acc.size(), 0.0);
  RealFft fft(cfg.window_size);
  const double scale = 1.0 / cfg.window_size;
  for (std::size_t k = 0; k < frames; ++k) {
    for (std::size_t f = 0; f < bins; ++f) {
      fft.spectrum()[f][0] = grid(f, k).real();
      fft.spectrum()[f][1] = grid(f, k).imag();
    }
    fft.inverse();
    const std::size_t start = k * static_cast<std::size_t>(cfg.hop);
    for (std::size_t i = 0; i < window.size(); ++i) {
      acc[start + i] += fft.real()[i] * scale * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }
  const double peak = norm.empty() ? 0.0 : *std::max_element(norm.begin(), norm.end());
  Waveform out;
  out.samples.assign(length, 0.0);
  // Edge samples see a single tapered frame; a floor on the denominator keeps
  // inconsistent (masked) grids from being amplified there by up to 1/w.
  const double floor = 1e-3 * peak;
  for (std::size_t i = 0; i < length && i < covered; ++i) {
    out.samples[i] = acc[i] / std::max(norm[i], floor);
  }
  return out;
}

void CompressionConfig::validate() const {
  require(beta > 0.0, ErrorCode::invalid_argument, "CompressionConfig: beta must be > 0");
  require(alpha > 0.0 && alpha <= 1.0, ErrorCode::invalid_argument,
          "CompressionConfig: alpha must lie in (0, 1]");
}

ComplexGrid compress(const ComplexGrid& grid, const CompressionConfig& cfg) {
  cfg.validate();
  ComplexGrid out = grid;
  for (cplx& v : out.values()) {
    const double mag = std::abs(v);
    if (mag == 0.0) continue;
    v *= cfg.beta * std::pow(mag, cfg.alpha) / mag;
  }
  return out;
}

ComplexGrid decompress(const ComplexGrid& grid, const CompressionConfig& cfg) {
  cfg.validate();
  ComplexGrid out = grid;
  for (cplx& v : out.values()) {
    const double mag = std::abs(v);
    if (mag == 0.0) continue;
    v *= std::pow(mag / cfg.beta, 1.0 / cfg.alpha) / mag;
  }
  return out;
}

Mixture mix_at_snr(const Waveform& s, const Waveform& n, double snr_db, RandomSource& rng) {
  require(std::isfinite(snr_db), ErrorCode::invalid_argument, "mix_at_snr: snr_db must be finite");
  require(!s.samples.empty(), ErrorCode::invalid_argument, "mix_at_snr: empty speech");
  if (n.size() < s.size()) {
    fail(ErrorCode::invalid_argument, "mix_at_snr: noise is shorter than speech");
  }
  std::size_t offset = 0;
  if (n.size() > s.size()) {
    const auto span = static_cast<double>(n.size() - s.size() + 1);
    offset = std::min(n.size() - s.size(), static_cast<std::size_t>(rng.uniform(0.0, span)));
  }
  Mixture out;
  out.scaled_noise.sample_rate = s.sample_rate;
  out.scaled_noise.samples.assign(n.samples.begin() + static_cast<std::ptrdiff_t>(offset),
                                  n.samples.begin() +
                                      static_cast<std::ptrdiff_t>(offset + s.size()));
  const double es = s.energy();
  const double en = out.scaled_noise.energy();
  require(es > 0.0, ErrorCode::invalid_argument, "mix_at_snr: speech is silent");
  require(en > 0.0, ErrorCode::invalid_argument, "mix_at_snr: noise is silent");
  const double gain = std::sqrt(es / (en * std::pow(10.0, snr_db / 10.0)));
  for (double& v : out.scaled_noise.samples) v *= gain;
  out.y = s;
  for (std::size_t i = 0; i < s.size(); ++i) out.y.samples[i] += out.scaled_noise.samples[i];
  return out;
}

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "read_wav: cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::string where = "read_wav(" + path.string() + "): ";
  if (bytes.size() < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    fail(ErrorCode::io, where + "not a RIFF/WAVE file");
  }
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  const unsigned char* samples = nullptr;
  std::size_t sample_bytes = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(data + pos + 4);
    const unsigned char* body = data + pos + 8;
    if (pos + 8 + size > bytes.size()) fail(ErrorCode::io, where + "truncated chunk");
    if (std::memcmp(data + pos, "fmt ", 4) == 0) {
      if (size < 16) fail(ErrorCode::io, where + "short fmt chunk");
      format = read_u16(body);
      channels = read_u16(body + 2);
      rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      if (format == kFormatExtensible && size >= 26) format = read_u16(body + 24);
    } else if (std::memcmp(data + pos, "data", 4) == 0) {
      samples = body;
      sample_bytes = size;
    }
    pos += 8 + size + (size & 1U);
  }
  if (samples == nullptr || format == 0) fail(ErrorCode::io, where + "missing fmt or data chunk");
  if (channels != 1) fail(ErrorCode::io, where + "only mono audio is supported");
  if (rate != static_cast<std::uint32_t>(kSampleRate)) {
    fail(ErrorCode::io, where + "sample rate " + std::to_string(rate) +
                            " Hz; inputs must already be 16 kHz");
  }
  Waveform w;
  if (format == kFormatPcm && bits == 16) {
    w.samples.resize(sample_bytes / 2);
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      const auto v = static_cast<std::int16_t>(read_u16(samples + 2 * i));
      w.samples[i] = v / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    w.samples.resize(sample_bytes / 4);
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      const std::uint32_t raw = read_u32(samples + 4 * i);
      float v;
      std::memcpy(&v, &raw, sizeof v);
      w.samples[i] = v;
    }
  } else {
    fail(ErrorCode::io, where + "unsupported encoding (need PCM16 or float32)");
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w, WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::pcm16;
  const std::uint16_t bytes_per_sample = pcm ? 2 : 4;
  const auto data_size = static_cast<std::uint32_t>(w.size() * bytes_per_sample);
  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * bytes_per_sample);
  put_u16(out, bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  out += "data";
  put_u32(out, data_size);
  for (double v : w.samples) {
    if (pcm) {
      const double clipped = std::clamp(v, -1.0, 32767.0 / 32768.0);
      const auto q = static_cast<std::int16_t>(std::lround(clipped * 32768.0));
      put_u16(out, static_cast<std::uint16_t>(q));
    } else {
      const auto f = static_cast<float>(v);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof raw);
      put_u32(out, raw);
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::io, "write_wav: cannot open " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) fail(ErrorCode::io, "write_wav: write failed for " + path.string());
}

void write_grid_csv(const ComplexGrid& grid, std::ostream& out) {
  char buf[64];
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", c == 0 ? "" : ",", grid(r, c).real(),
                    grid(r, c).imag());
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace sdese
