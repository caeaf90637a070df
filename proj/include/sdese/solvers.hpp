// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sdese/complex_grid.hpp"
#include "sdese/random.hpp"
#include "sdese/score.hpp"
#include "sdese/sde.hpp"

namespace sdese {

struct SamplerConfig {
  double t_rsp = 1.0;
  int n_steps = 60;
  std::uint64_t seed = 0;
  // Skip the stochastic term on the final step.
  bool denoise_final = false;

  double dt() const { return t_rsp / n_steps; }
  void validate(const SdeSpec& spec) const;
};

struct DiffusionState {
  double t = 0.0;
  ComplexGrid x;
};

using Trajectory = std::vector<DiffusionState>;

/// Forward Euler-Maruyama from (0, x0) to t_end with a uniform step dt.
/// t_end must be an integer multiple of dt (to 1e-9 relative).
Trajectory forward_euler_maruyama(const SdeSpec& spec, const ComplexGrid& x0,
                                  const ComplexGrid& y, double t_end, double dt,
                                  RandomSource& rng);

struct KernelStats {
  double t = 0.0;
  ComplexGrid mean;
  // Pooled complex variance E|x - mean|^2, averaged over coefficients.
  double var = 0.0;
  // Standard error of each mean coefficient, sqrt(var / n_paths).
  double mean_stderr = 0.0;
  // Empirical standard error of `var`.
  double var_stderr = 0.0;
  std::size_t n_paths = 0;
};

inline constexpr std::size_t kMinMonteCarloPaths = 1000;

KernelStats monte_carlo_kernel_stats(const SdeSpec& spec, const ComplexGrid& x0,
                                     const ComplexGrid& y, double t, std::size_t n_paths,
                                     double dt, RandomSource& rng);

/// Same estimator evaluated at several checkpoints of one set of paths.
/// Every checkpoint must lie on the dt grid. Paths are simulated in batches
/// on a thread pool; batch b draws from RandomSource::split(base, b) where
/// base is one draw from `rng`, so results do not depend on thread count.
std::vector<KernelStats> monte_carlo_kernel_stats(const SdeSpec& spec, const ComplexGrid& x0,
                                                  const ComplexGrid& y,
                                                  std::span<const double> checkpoints,
                                                  std::size_t n_paths, double dt,
                                                  RandomSource& rng);

/// Reverse-time Euler-Maruyama. Starts from N_C(y, sigma(t_rsp)^2 I) and
/// takes cfg.n_steps uniform steps t_k = t_rsp (1 - k/N) down to 0, calling
/// `score` exactly once per step.
ComplexGrid reverse_euler_maruyama(const SdeSpec& spec, const ComplexGrid& y,
                                   const ScoreFunction& score, const SamplerConfig& cfg,
                                   RandomSource& rng);

// Uses RandomSource(cfg.seed).
ComplexGrid reverse_euler_maruyama(const SdeSpec& spec, const ComplexGrid& y,
                                   const ScoreFunction& score, const SamplerConfig& cfg);

// Columns: t, re_0, im_0, re_1, im_1, ...
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

}  // namespace sdese
