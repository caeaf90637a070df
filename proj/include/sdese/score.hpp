// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>
#include <span>

#include "sdese/complex_grid.hpp"
#include "sdese/random.hpp"
#include "sdese/sde.hpp"

namespace sdese {

/// s(x, y, t) ~ grad_x log p_t(x | y). Implementations must be callable
/// concurrently and return a grid shaped like x.
using ScoreFunction =
    std::function<ComplexGrid(const ComplexGrid& x, const ComplexGrid& y, double t)>;

/// X_0 ~ N_C(m0, s0sq I), independent of the conditioning y given the task.
struct GaussianTask {
  ComplexGrid m0;
  double s0sq = 0.0;
  SdeSpec spec;
};

// Mean and variance of p_t(x | y) with X_0 marginalised out.
ComplexGrid marginal_mean(const GaussianTask& task, const ComplexGrid& y, double t);
double marginal_variance(const GaussianTask& task, double t);

// Exact score of the Gaussian task:
//   s(x, y, t) = -(x - a(t) m0 - b(t) y) / (a(t)^2 s0sq + sigma(t)^2)
// `scale` multiplies the result; scale != 1 gives the perturbed family used
// to probe the optimum of dsm_loss.
ScoreFunction analytic_gaussian_score(GaussianTask task, double scale = 1.0);

struct TrainingPair {
  ComplexGrid x0;
  ComplexGrid y;
};

inline constexpr double kDsmTimeFloor = 0.03;

/// Monte-Carlo estimate of the denoising score-matching objective
///   E || s(mu(t) + sigma(t) Z, y, t) + Z / sigma(t) ||^2
/// with t ~ U[t_eps, T], one Z draw per (t, pair).
double dsm_loss(const ScoreFunction& score, const SdeSpec& spec,
                std::span<const TrainingPair> batch, int n_t_samples, RandomSource& rng,
                double t_eps = kDsmTimeFloor);

}  // namespace sdese
