// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/metrics.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <memory>
#include <regex>
#include <string>
#include <string_view>

#include "sdese/error.hpp"

namespace sdese {

GainFunction gain_function(const ComplexGrid& s_hat, const ComplexGrid& y,
                           const GainOptions& options) {
  require_same_shape(s_hat, y, "gain_function");
  require(options.eps_rel >= 0.0 && options.g_max > 0.0, ErrorCode::invalid_argument,
          "gain_function: eps_rel must be >= 0 and g_max > 0");
  double peak = 0.0;
  for (const cplx& v : y.values()) peak = std::max(peak, std::abs(v));
  const double floor = options.eps_rel * peak;

  GainFunction out{ComplexGrid(y.rows(), y.cols(), cplx{1.0, 0.0}), 0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double mag_y = std::abs(y[i]);
    if (mag_y == 0.0 || mag_y < floor) {
      ++out.guarded_cells;
      continue;
    }
    cplx g = s_hat[i] / y[i];
    const double mag_g = std::abs(g);
    if (!std::isfinite(mag_g)) {
      fail(ErrorCode::domain, "gain_function: non-finite estimate at cell " + std::to_string(i));
    }
    if (mag_g > options.g_max) {
      g *= options.g_max / mag_g;
      ++out.guarded_cells;
    }
    out.values[i] = g;
  }
  return out;
}

FilteredComponents filtered_components(const GainFunction& gain, const ComplexGrid& s,
                                       const ComplexGrid& y, const StftConfig& cfg,
                                       std::size_t length) {
  require_same_shape(gain.values, s, "filtered_components (gain vs s)");
  require_same_shape(s, y, "filtered_components (s vs y)");
  if (length == 0) length = natural_length(s.cols(), cfg);
  ComplexGrid gs = s;
  ComplexGrid gn = y - s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    gs[i] *= gain.values[i];
    gn[i] *= gain.values[i];
  }
  return {istft(gs, cfg, length), istft(gn, cfg, length)};
}

namespace {

void validate_segments(const SegmentOptions& o) {
  require(o.seg_len > 0, ErrorCode::invalid_argument, "SegmentOptions: seg_len must be > 0");
  require(o.floor_db < o.ceil_db, ErrorCode::invalid_argument,
          "SegmentOptions: floor_db must be below ceil_db");
  require(o.silence_rel >= 0.0, ErrorCode::invalid_argument,
          "SegmentOptions: silence_rel must be >= 0");
}

double energy(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

// Mean over non-silent reference segments of clamp(10 log10(|ref|^2 / |other|^2)).
// `other` is produced per segment by `residual`.
template <typename Residual>
double segmental_ratio(const std::vector<double>& ref, const SegmentOptions& o, const char* what,
                       Residual residual) {
  validate_segments(o);
  require(!ref.empty(), ErrorCode::invalid_argument, "segmental metric: empty signal");
  const std::size_t seg = std::min(o.seg_len, ref.size());
  const std::size_t count = ref.size() / seg;

  std::vector<double> ref_energy(count);
  double mean = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    ref_energy[k] = energy(std::span(ref).subspan(k * seg, seg));
    mean += ref_energy[k];
  }
  mean /= static_cast<double>(count);

  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (ref_energy[k] <= 0.0 || ref_energy[k] < o.silence_rel * mean) continue;
    const double denom = residual(k * seg, seg);
    double db = o.ceil_db;
    if (denom > 0.0) db = std::clamp(10.0 * std::log10(ref_energy[k] / denom), o.floor_db, o.ceil_db);
    total += db;
    ++used;
  }
  if (used == 0) fail(ErrorCode::domain, std::string(what) + ": all segments are silent");
  return total / static_cast<double>(used);
}

}  // namespace

double noise_attenuation(const Waveform& n, const Waveform& n_tilde,
                         const SegmentOptions& options) {
  if (n.size() != n_tilde.size()) {
    fail(ErrorCode::shape_mismatch, "noise_attenuation: length " + std::to_string(n.size()) +
                                        " vs " + std::to_string(n_tilde.size()));
  }
  return segmental_ratio(n.samples, options, "noise_attenuation",
                         [&](std::size_t start, std::size_t len) {
                           return energy(std::span(n_tilde.samples).subspan(start, len));
                         });
}

double speech_quality_proxy(const Waveform& s_tilde, const Waveform& s,
                            const SegmentOptions& options) {
  if (s.size() != s_tilde.size()) {
    fail(ErrorCode::shape_mismatch, "speech_quality_proxy: length " +
                                        std::to_string(s_tilde.size()) + " vs " +
                                        std::to_string(s.size()));
  }
  return segmental_ratio(s.samples, options, "speech_quality_proxy",
                         [&](std::size_t start, std::size_t len) {
                           double acc = 0.0;
                           for (std::size_t i = start; i < start + len; ++i) {
                             const double d = s_tilde.samples[i] - s.samples[i];
                             acc += d * d;
                           }
                           return acc;
                         });
}

namespace {

bool is_executable(const std::filesystem::path& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::filesystem::path resolve_executable(const std::string& name) {
  if (name.find('/') != std::string::npos) {
    return is_executable(name) ? std::filesystem::path(name) : std::filesystem::path();
  }
  const char* path_env = std::getenv("PATH");
  if (path_env == nullptr) return {};
  std::string_view rest(path_env);
  while (true) {
    const auto colon = rest.find(':');
    const std::string_view dir = rest.substr(0, colon);
    const std::filesystem::path candidate =
        std::filesystem::path(dir.empty() ? "." : std::string(dir)) / name;
    if (is_executable(candidate)) return candidate;
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  return {};
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

std::string replace_all(std::string s, std::string_view from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

// Removes its files on scope exit.
struct TempWavPair {
  std::filesystem::path ref;
  std::filesystem::path deg;
  ~TempWavPair() {
    std::error_code ec;
    std::filesystem::remove(ref, ec);
    std::filesystem::remove(deg, ec);
  }
};

std::atomic<unsigned long> temp_counter{0};

}  // namespace

double MetricAdapter::evaluate(const Waveform& ref, const Waveform& deg) const {
  if (!configured()) fail(ErrorCode::not_configured, "external metric: no executable configured");
  const std::filesystem::path exe = resolve_executable(config_.executable);
  if (exe.empty()) {
    fail(ErrorCode::not_configured,
         "external metric: executable not found: " + config_.executable);
  }
  std::regex pattern;
  try {
    pattern = std::regex(config_.stdout_regex);
  } catch (const std::regex_error& e) {
    fail(ErrorCode::invalid_argument, std::string("external metric: bad stdout_regex: ") + e.what());
  }

  std::lock_guard lock(mutex_);
  const std::string stem = "sdese_metric_" + std::to_string(::getpid()) + "_" +
                           std::to_string(temp_counter.fetch_add(1));
  TempWavPair files{std::filesystem::temp_directory_path() / (stem + "_ref.wav"),
                    std::filesystem::temp_directory_path() / (stem + "_deg.wav")};
  write_wav(files.ref, ref, WavEncoding::pcm16);
  write_wav(files.deg, deg, WavEncoding::pcm16);

  std::string command = shell_quote(exe.string());
  for (const std::string& arg : config_.args) {
    std::string a = replace_all(arg, "{ref}", files.ref.string());
    a = replace_all(a, "{deg}", files.deg.string());
    command += ' ' + shell_quote(a);
  }
  command += " 2>/dev/null";

  std::unique_ptr<FILE, int (*)(FILE*)> pipe(::popen(command.c_str(), "r"), ::pclose);
  if (!pipe) fail(ErrorCode::io, "external metric: failed to launch " + exe.string());
  std::string output;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe.get())) output.append(buf, got);
  const int status = ::pclose(pipe.release());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    fail(ErrorCode::io, "external metric: " + exe.string() + " exited with failure");
  }

  std::smatch match;
  if (!std::regex_search(output, match, pattern)) {
    fail(ErrorCode::parse, "external metric: no score in tool output");
  }
  std::string token = match.size() > 1 ? match[1].str() : match[0].str();
  if (!token.empty() && token.front() == '+') token.erase(0, 1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size() || !std::isfinite(value)) {
    fail(ErrorCode::parse, "external metric: cannot parse '" + token + "' as a number");
  }
  return value;
}

double external_metric(const MetricAdapter& adapter, const Waveform& ref, const Waveform& deg) {
  return adapter.evaluate(ref, deg);
}

}  // namespace sdese
