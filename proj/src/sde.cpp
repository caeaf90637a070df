// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/sde.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "sdese/error.hpp"
#include "sdese/special_functions.hpp"

namespace sdese {

std::string_view to_string(SdeKind kind) noexcept {
  return kind == SdeKind::ouve ? "ouve" : "bbed";
}

SdeKind parse_sde_kind(std::string_view name) {
  std::string lower(name);
  for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "ouve") return SdeKind::ouve;
  if (lower == "bbed") return SdeKind::bbed;
  fail(ErrorCode::parse, "unknown SDE kind '" + std::string(name) + "' (expected ouve or bbed)");
}

SdeSpec::SdeSpec(SdeKind kind, double gamma, double c, double k, double T)
    : kind_(kind), gamma_(gamma), c_(c), k_(k), T_(T) {
  require(std::isfinite(c) && c > 0.0, ErrorCode::invalid_argument, "SdeSpec: c must be > 0");
  require(std::isfinite(k) && k > 0.0, ErrorCode::invalid_argument, "SdeSpec: k must be > 0");
  require(std::isfinite(T) && T > 0.0, ErrorCode::invalid_argument, "SdeSpec: T must be > 0");
  require(std::isfinite(gamma) && gamma >= 0.0, ErrorCode::invalid_argument,
          "SdeSpec: gamma must be finite and non-negative");
  if (kind == SdeKind::ouve) {
    require(gamma > 0.0, ErrorCode::invalid_argument, "SdeSpec: OUVE needs gamma > 0");
    require(std::abs(gamma + std::log(k)) > 1e-12, ErrorCode::invalid_argument,
            "SdeSpec: OUVE needs gamma + ln(k) != 0");
  } else {
    require(T < 1.0, ErrorCode::invalid_argument, "SdeSpec: BBED needs T < 1");
  }
}

SdeSpec SdeSpec::ouve(double c, double gamma, double k, double T) {
  return {SdeKind::ouve, gamma, c, k, T};
}

SdeSpec SdeSpec::bbed(double c, double k, double T) { return {SdeKind::bbed, 0.0, c, k, T}; }

SdeSpec SdeSpec::defaults(SdeKind kind) {
  return kind == SdeKind::ouve ? ouve() : bbed();
}

std::string SdeSpec::to_config() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "kind = %s\ngamma = %.17g\nc = %.17g\nk = %.17g\nT = %.17g\n",
                std::string(to_string(kind_)).c_str(), gamma_, c_, k_, T_);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorCode::parse, "SDE config: bad number '" + std::string(text) + "' for key " +
                               std::string(key));
  }
  return value;
}

}  // namespace

SdeSpec SdeSpec::from_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> values;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::parse, "SDE config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    if (key != "kind" && key != "gamma" && key != "c" && key != "k" && key != "T") {
      fail(ErrorCode::parse, "SDE config: unknown key '" + key + "'");
    }
    values[key] = value;
  }
  const auto kind_it = values.find("kind");
  if (kind_it == values.end()) fail(ErrorCode::parse, "SDE config: missing key 'kind'");
  const SdeKind kind = parse_sde_kind(kind_it->second);
  const SdeSpec base = defaults(kind);
  auto get = [&](const char* key, double fallback) {
    const auto it = values.find(key);
    return it == values.end() ? fallback : parse_double(key, it->second);
  };
  return {kind, get("gamma", base.gamma()), get("c", base.c()), get("k", base.k()),
          get("T", base.T())};
}

double drift_rate(const SdeSpec& spec, double t) {
  if (spec.kind() == SdeKind::ouve) return spec.gamma();
  if (!(t < 1.0 - kBbedSingularityGuard)) {
    fail(ErrorCode::singularity, "BBED drift evaluated at t = " + std::to_string(t) +
                                     ", too close to the singularity at t = 1");
  }
  return 1.0 / (1.0 - t);
}

ComplexGrid drift(const SdeSpec& spec, const ComplexGrid& x, const ComplexGrid& y, double t) {
  require_same_shape(x, y, "drift");
  const double rate = drift_rate(spec, t);
  ComplexGrid out = y;
  out -= x;
  out *= rate;
  return out;
}

double diffusion(const SdeSpec& spec, double t) {
  require(t >= 0.0, ErrorCode::domain, "diffusion: t must be >= 0");
  return std::sqrt(spec.c()) * std::pow(spec.k(), t);
}

MeanCoefficients mean_coefficients(const SdeSpec& spec, double t) {
  if (spec.kind() == SdeKind::ouve) {
    const double a = std::exp(-spec.gamma() * t);
    return {a, -std::expm1(-spec.gamma() * t)};
  }
  return {1.0 - t, t};
}

double kernel_variance(const SdeSpec& spec, double t) {
  require(t >= 0.0, ErrorCode::domain, "kernel_variance: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double c = spec.c();
  const double lk = std::log(spec.k());
  double var = 0.0;
  if (spec.kind() == SdeKind::ouve) {
    // k^{2t} - e^{-2 gamma t} = e^{-2 gamma t} (e^{2t (ln k + gamma)} - 1)
    const double g = spec.gamma();
    var = c * std::exp(-2.0 * g * t) * std::expm1(2.0 * t * (lk + g)) / (2.0 * (g + lk));
  } else {
    require(t < 1.0, ErrorCode::domain, "kernel_variance: BBED needs t < 1");
    const double k = spec.k();
    if (std::abs(lk) < 1e-12) {
      // k -> 1 limit: 2 k^2 ln k (1-t) E -> 0 and k^{2t} - 1 -> 0.
      var = (1.0 - t) * c * t;
    } else {
      const double e = expint_ei(2.0 * (t - 1.0) * lk) - expint_ei(-2.0 * lk);
      const double bracket = std::expm1(2.0 * t * lk) + t + 2.0 * k * k * lk * (1.0 - t) * e;
      var = (1.0 - t) * c * bracket;
    }
  }
  // Both closed forms are differences of nearly equal terms for small t.
  return var > 0.0 ? var : 0.0;
}

namespace {

void require_time_in_range(const SdeSpec& spec, double t, const char* what) {
  if (!(t >= 0.0 && t <= spec.T())) {
    fail(ErrorCode::domain, std::string(what) + ": t = " + std::to_string(t) +
                                " outside [0, T = " + std::to_string(spec.T()) + "]");
  }
}

ComplexGrid kernel_mean(const SdeSpec& spec, const ComplexGrid& x0, const ComplexGrid& y,
                        double t) {
  const auto [a, b] = mean_coefficients(spec, t);
  ComplexGrid mean = x0;
  mean *= a;
  mean.add_scaled(y, b);
  return mean;
}

}  // namespace

KernelMoments kernel_moments(const SdeSpec& spec, const ComplexGrid& x0, const ComplexGrid& y,
                             double t) {
  require_same_shape(x0, y, "kernel_moments");
  require_time_in_range(spec, t, "kernel_moments");
  return {kernel_mean(spec, x0, y, t), std::sqrt(kernel_variance(spec, t))};
}

ComplexGrid sample_perturbation(const SdeSpec& spec, const ComplexGrid& x0, const ComplexGrid& y,
                                double t, RandomSource& rng) {
  KernelMoments m = kernel_moments(spec, x0, y, t);
  ComplexGrid z = rng.complex_normal_like(m.mean);
  m.mean.add_scaled(z, m.std);
  return std::move(m.mean);
}

double prior_mismatch(const SdeSpec& spec, const ComplexGrid& x0, const ComplexGrid& y) {
  require_same_shape(x0, y, "prior_mismatch");
  // mu(T) - y = a(T) (x0 - y) since a + b = 1 for both SDEs.
  const double a = mean_coefficients(spec, spec.T()).a;
  return a * (x0 - y).norm();
}

}  // namespace sdese
