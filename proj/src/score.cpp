// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/score.hpp"

#include <cmath>
#include <string>

#include "sdese/error.hpp"

namespace sdese {

ComplexGrid marginal_mean(const GaussianTask& task, const ComplexGrid& y, double t) {
  require_same_shape(task.m0, y, "marginal_mean");
  const auto [a, b] = mean_coefficients(task.spec, t);
  ComplexGrid mean = task.m0;
  mean *= a;
  mean.add_scaled(y, b);
  return mean;
}

double marginal_variance(const GaussianTask& task, double t) {
  const double a = mean_coefficients(task.spec, t).a;
  return a * a * task.s0sq + kernel_variance(task.spec, t);
}

ScoreFunction analytic_gaussian_score(GaussianTask task, double scale) {
  require(task.s0sq >= 0.0 && std::isfinite(task.s0sq), ErrorCode::invalid_argument,
          "analytic_gaussian_score: s0sq must be finite and >= 0");
  return [task = std::move(task), scale](const ComplexGrid& x, const ComplexGrid& y, double t) {
    require_same_shape(x, y, "analytic_gaussian_score");
    const double var = marginal_variance(task, t);
    if (!(var > 0.0)) {
      fail(ErrorCode::domain, "analytic_gaussian_score: marginal variance is zero at t = " +
                                  std::to_string(t));
    }
    ComplexGrid out = marginal_mean(task, y, t);
    out -= x;
    out *= scale / var;
    return out;
  };
}

double dsm_loss(const ScoreFunction& score, const SdeSpec& spec,
                std::span<const TrainingPair> batch, int n_t_samples, RandomSource& rng,
                double t_eps) {
  require(!batch.empty(), ErrorCode::invalid_argument, "dsm_loss: batch is empty");
  require(n_t_samples > 0, ErrorCode::invalid_argument, "dsm_loss: n_t_samples must be > 0");
  require(t_eps > 0.0 && t_eps < spec.T(), ErrorCode::invalid_argument,
          "dsm_loss: t_eps must lie in (0, T)");
  double total = 0.0;
  for (int i = 0; i < n_t_samples; ++i) {
    const double t = rng.uniform(t_eps, spec.T());
    const double sigma = std::sqrt(kernel_variance(spec, t));
    for (const TrainingPair& pair : batch) {
      KernelMoments m = kernel_moments(spec, pair.x0, pair.y, t);
      const ComplexGrid z = rng.complex_normal_like(m.mean);
      ComplexGrid xt = std::move(m.mean);
      xt.add_scaled(z, sigma);
      ComplexGrid residual = score(xt, pair.y, t);
      residual.add_scaled(z, 1.0 / sigma);
      total += residual.squared_norm();
    }
  }
  return total / (static_cast<double>(n_t_samples) * static_cast<double>(batch.size()));
}

}  // namespace sdese
