// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <string_view>

#include "sdese/complex_grid.hpp"
#include "sdese/random.hpp"

namespace sdese {

enum class SdeKind { ouve, bbed };

std::string_view to_string(SdeKind kind) noexcept;
SdeKind parse_sde_kind(std::string_view name);

/// Parameters of one conditional-interpolation SDE.
///
/// OUVE: f = gamma (y - x), g(t) = sqrt(c) k^t, defined for all t >= 0.
/// BBED: f = (y - x) / (1 - t), g(t) = sqrt(c) k^t, defined for t < 1.
///
/// `T` is the largest diffusion time the process is used at; the reverse
/// solver starts there by default. Construction validates all invariants.
class SdeSpec {
 public:
  SdeSpec(SdeKind kind, double gamma, double c, double k, double T);

  // Defaults: gamma=1.5, k=10, T=1.0 (OUVE) and k=2.6, T=0.999 (BBED).
  static SdeSpec ouve(double c = 0.18, double gamma = 1.5, double k = 10.0,
                      double T = 1.0);
  static SdeSpec bbed(double c = 0.08, double k = 2.6, double T = 0.999);
  static SdeSpec defaults(SdeKind kind);

  SdeKind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }
  double c() const noexcept { return c_; }
  double k() const noexcept { return k_; }
  double T() const noexcept { return T_; }

  SdeSpec with_c(double c) const { return {kind_, gamma_, c, k_, T_}; }

  // Plain-text "key = value" form with keys kind, gamma, c, k, T.
  std::string to_config() const;
  static SdeSpec from_config(std::string_view text);

  friend bool operator==(const SdeSpec&, const SdeSpec&) = default;

 private:
  SdeKind kind_;
  double gamma_;
  double c_;
  double k_;
  double T_;
};

inline constexpr double kBbedSingularityGuard = 1e-6;

/// Mean of the perturbation kernel is a(t) x0 + b(t) y.
struct MeanCoefficients {
  double a;
  double b;
};

struct KernelMoments {
  ComplexGrid mean;
  double std = 0.0;
};

ComplexGrid drift(const SdeSpec& spec, const ComplexGrid& x, const ComplexGrid& y, double t);

// Scalar drift rate lambda(t) with f = lambda(t) (y - x).
double drift_rate(const SdeSpec& spec, double t);

double diffusion(const SdeSpec& spec, double t);

MeanCoefficients mean_coefficients(const SdeSpec& spec, double t);

// sigma(t)^2 of the perturbation kernel; exactly 0 at t = 0.
double kernel_variance(const SdeSpec& spec, double t);

KernelMoments kernel_moments(const SdeSpec& spec, const ComplexGrid& x0,
                             const ComplexGrid& y, double t);

ComplexGrid sample_perturbation(const SdeSpec& spec, const ComplexGrid& x0,
                                const ComplexGrid& y, double t, RandomSource& rng);

// ||mu(T) - y||_2
double prior_mismatch(const SdeSpec& spec, const ComplexGrid& x0, const ComplexGrid& y);

}  // namespace sdese
