// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <thread>

#include "sdese/error.hpp"

namespace sdese {

void SamplerConfig::validate(const SdeSpec& spec) const {
  require(n_steps >= 1, ErrorCode::invalid_argument, "SamplerConfig: n_steps must be >= 1");
  if (!(t_rsp > 0.0 && t_rsp <= spec.T())) {
    fail(ErrorCode::invalid_argument, "SamplerConfig: t_rsp = " + std::to_string(t_rsp) +
                                          " outside (0, T = " + std::to_string(spec.T()) + "]");
  }
}

namespace {

std::size_t step_count(double t_end, double dt) {
  require(dt > 0.0 && std::isfinite(dt), ErrorCode::invalid_argument,
          "forward_euler_maruyama: dt must be > 0");
  const double ratio = t_end / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    fail(ErrorCode::invalid_argument, "forward_euler_maruyama: t_end = " +
                                          std::to_string(t_end) +
                                          " is not a multiple of dt = " + std::to_string(dt));
  }
  return static_cast<std::size_t>(rounded);
}

void check_forward_range(const SdeSpec& spec, double t_end, double dt) {
  if (spec.kind() == SdeKind::bbed && t_end >= 1.0) {
    fail(ErrorCode::singularity, "forward_euler_maruyama: BBED cannot integrate to t >= 1");
  }
  if (!(t_end >= 0.0 && t_end <= spec.T())) {
    fail(ErrorCode::domain, "forward_euler_maruyama: t_end outside [0, T]");
  }
  if (t_end > 0.0 && dt > t_end * (1.0 + 1e-12)) {
    fail(ErrorCode::invalid_argument, "forward_euler_maruyama: dt exceeds t_end");
  }
}

}  // namespace

Trajectory forward_euler_maruyama(const SdeSpec& spec, const ComplexGrid& x0,
                                  const ComplexGrid& y, double t_end, double dt,
                                  RandomSource& rng) {
  require_same_shape(x0, y, "forward_euler_maruyama");
  check_forward_range(spec, t_end, dt);
  const std::size_t n = step_count(t_end, dt);
  Trajectory out;
  out.reserve(n + 1);
  out.push_back({0.0, x0});
  ComplexGrid x = x0;
  ComplexGrid z(x0.rows(), x0.cols());
  const double sqrt_dt = std::sqrt(dt);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double rate = drift_rate(spec, t);
    const double g = diffusion(spec, t);
    rng.fill_complex_normal(z);
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] += rate * (y[j] - x[j]) * dt + g * sqrt_dt * z[j];
    }
    out.push_back({static_cast<double>(i + 1) * dt, x});
  }
  return out;
}

namespace {

constexpr std::size_t kPathBatch = 4096;

// Running per-coefficient sums for one batch of paths at one checkpoint.
struct BatchMoments {
  std::size_t count = 0;
  std::vector<cplx> mean;
  std::vector<double> m2;       // sum |x - mean|^2 per coefficient
};

// Chan et al. pairwise update; `into` and `from` cover disjoint path sets.
void merge(BatchMoments& into, const BatchMoments& from) {
  if (from.count == 0) return;
  if (into.count == 0) {
    into = from;
    return;
  }
  const double na = static_cast<double>(into.count);
  const double nb = static_cast<double>(from.count);
  const double n = na + nb;
  for (std::size_t j = 0; j < into.mean.size(); ++j) {
    const cplx delta = from.mean[j] - into.mean[j];
    into.mean[j] += delta * (nb / n);
    into.m2[j] += from.m2[j] + std::norm(delta) * na * nb / n;
  }
  into.count += from.count;
}

struct BatchResult {
  std::vector<BatchMoments> at_checkpoint;
  // Sums over paths of D = mean_j |x_j - ref_j|^2 and of D^2, for the
  // standard error of the variance estimate.
  std::vector<double> sum_sq_dev;
  std::vector<double> sum_sq_dev2;
};

BatchResult simulate_batch(const SdeSpec& spec, const ComplexGrid& x0, const ComplexGrid& y,
                           const std::vector<std::size_t>& checkpoint_steps,
                           const std::vector<ComplexGrid>& reference, std::size_t n_paths,
                           double dt, std::uint64_t seed) {
  RandomSource rng(seed);
  const std::size_t d = x0.size();
  std::vector<cplx> state(n_paths * d);
  for (std::size_t p = 0; p < n_paths; ++p) {
    std::copy(x0.values().begin(), x0.values().end(), state.begin() + p * d);
  }
  BatchResult result;
  result.at_checkpoint.resize(checkpoint_steps.size());
  result.sum_sq_dev.assign(checkpoint_steps.size(), 0.0);
  result.sum_sq_dev2.assign(checkpoint_steps.size(), 0.0);

  const double sqrt_dt = std::sqrt(dt);
  std::size_t step = 0;
  for (std::size_t c = 0; c < checkpoint_steps.size(); ++c) {
    for (; step < checkpoint_steps[c]; ++step) {
      const double t = static_cast<double>(step) * dt;
      const double rate_dt = drift_rate(spec, t) * dt;
      const double noise = diffusion(spec, t) * sqrt_dt;
      for (std::size_t p = 0; p < n_paths; ++p) {
        cplx* x = state.data() + p * d;
        for (std::size_t j = 0; j < d; ++j) {
          x[j] += rate_dt * (y[j] - x[j]) + noise * rng.complex_normal();
        }
      }
    }
    BatchMoments& m = result.at_checkpoint[c];
    m.count = n_paths;
    m.mean.assign(d, cplx{});
    m.m2.assign(d, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
      for (std::size_t j = 0; j < d; ++j) m.mean[j] += state[p * d + j];
    }
    for (auto& v : m.mean) v /= static_cast<double>(n_paths);
    const ComplexGrid& ref = reference[c];
    for (std::size_t p = 0; p < n_paths; ++p) {
      double dev = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        m.m2[j] += std::norm(state[p * d + j] - m.mean[j]);
        dev += std::norm(state[p * d + j] - ref[j]);
      }
      dev /= static_cast<double>(d);
      result.sum_sq_dev[c] += dev;
      result.sum_sq_dev2[c] += dev * dev;
    }
  }
  return result;
}

}  // namespace

std::vector<KernelStats> monte_carlo_kernel_stats(const SdeSpec& spec, const ComplexGrid& x0,
                                                  const ComplexGrid& y,
                                                  std::span<const double> checkpoints,
                                                  std::size_t n_paths, double dt,
                                                  RandomSource& rng) {
  require_same_shape(x0, y, "monte_carlo_kernel_stats");
  require(n_paths >= kMinMonteCarloPaths, ErrorCode::invalid_argument,
          "monte_carlo_kernel_stats: n_paths must be >= 1000");
  require(!checkpoints.empty(), ErrorCode::invalid_argument,
          "monte_carlo_kernel_stats: no checkpoints");
  std::vector<std::size_t> steps;
  std::vector<ComplexGrid> reference;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const double t = checkpoints[i];
    require(i == 0 || t > checkpoints[i - 1], ErrorCode::invalid_argument,
            "monte_carlo_kernel_stats: checkpoints must be increasing");
    check_forward_range(spec, t, t > 0.0 ? dt : 0.0);
    steps.push_back(t > 0.0 ? step_count(t, dt) : 0);
    // Deviations are taken around the closed-form mean so that the variance
    // of the pooled estimator can be tracked in one pass.
    reference.push_back(kernel_moments(spec, x0, y, t).mean);
  }

  const std::uint64_t base = rng.next_u64();
  const std::size_t n_batches = (n_paths + kPathBatch - 1) / kPathBatch;
  std::vector<BatchResult> results(n_batches);
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(n_batches)));
  auto run = [&](unsigned worker) {
    for (std::size_t b = worker; b < n_batches; b += workers) {
      const std::size_t count = std::min(kPathBatch, n_paths - b * kPathBatch);
      results[b] = simulate_batch(spec, x0, y, steps, reference, count, dt,
                                  RandomSource::derive_seed(base, b));
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  std::vector<KernelStats> out;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    BatchMoments total;
    double s1 = 0.0;
    double s2 = 0.0;
    for (const BatchResult& r : results) {
      merge(total, r.at_checkpoint[c]);
      s1 += r.sum_sq_dev[c];
      s2 += r.sum_sq_dev2[c];
    }
    const double n = static_cast<double>(n_paths);
    KernelStats stats;
    stats.t = checkpoints[c];
    stats.n_paths = n_paths;
    stats.mean = ComplexGrid(x0.rows(), x0.cols(), std::move(total.mean));
    double m2 = 0.0;
    for (double v : total.m2) m2 += v;
    stats.var = m2 / (n - 1.0) / static_cast<double>(x0.size());
    stats.mean_stderr = std::sqrt(stats.var / n);
    const double mean_dev = s1 / n;
    const double var_dev = std::max(0.0, s2 / n - mean_dev * mean_dev);
    stats.var_stderr = std::sqrt(var_dev / n);
    out.push_back(std::move(stats));
  }
  return out;
}

KernelStats monte_carlo_kernel_stats(const SdeSpec& spec, const ComplexGrid& x0,
                                     const ComplexGrid& y, double t, std::size_t n_paths,
                                     double dt, RandomSource& rng) {
  const double checkpoint[] = {t};
  return std::move(monte_carlo_kernel_stats(spec, x0, y, checkpoint, n_paths, dt, rng).front());
}

ComplexGrid reverse_euler_maruyama(const SdeSpec& spec, const ComplexGrid& y,
                                   const ScoreFunction& score, const SamplerConfig& cfg,
                                   RandomSource& rng) {
  cfg.validate(spec);
  require(static_cast<bool>(score), ErrorCode::not_configured,
          "reverse_euler_maruyama: no score function");
  const double dt = cfg.dt();
  const double sqrt_dt = std::sqrt(dt);

  ComplexGrid x = rng.complex_normal_like(y);
  x *= std::sqrt(kernel_variance(spec, cfg.t_rsp));
  x += y;

  ComplexGrid z(y.rows(), y.cols());
  for (int k = 0; k < cfg.n_steps; ++k) {
    const double t = cfg.t_rsp * (1.0 - static_cast<double>(k) / cfg.n_steps);
    const ComplexGrid s = score(x, y, t);
    require_same_shape(s, x, "reverse_euler_maruyama: score output");
    if (!s.all_finite()) {
      throw DivergedError(t, "reverse_euler_maruyama: non-finite score at t = " +
                                 std::to_string(t));
    }
    const double rate = drift_rate(spec, t);
    const double g = diffusion(spec, t);
    const double g2 = g * g;
    const bool last = k + 1 == cfg.n_steps;
    const bool noisy = !(last && cfg.denoise_final);
    if (noisy) rng.fill_complex_normal(z);
    // x_{t - dt} = x_t - [f(x_t, y) - g^2 s] dt + g sqrt(dt) z
    for (std::size_t j = 0; j < x.size(); ++j) {
      const cplx f = rate * (y[j] - x[j]);
      x[j] -= (f - g2 * s[j]) * dt;
      if (noisy) x[j] += g * sqrt_dt * z[j];
    }
    if (!x.all_finite()) {
      throw DivergedError(t, "reverse_euler_maruyama: state became non-finite after t = " +
                                 std::to_string(t));
    }
  }
  return x;
}

ComplexGrid reverse_euler_maruyama(const SdeSpec& spec, const ComplexGrid& y,
                                   const ScoreFunction& score, const SamplerConfig& cfg) {
  RandomSource rng(cfg.seed);
  return reverse_euler_maruyama(spec, y, score, cfg, rng);
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
  if (trajectory.empty()) return;
  out << "t";
  for (std::size_t j = 0; j < trajectory.front().x.size(); ++j) {
    out << ",re_" << j << ",im_" << j;
  }
  out << '\n';
  char buf[64];
  for (const DiffusionState& state : trajectory) {
    std::snprintf(buf, sizeof buf, "%.17g", state.t);
    out << buf;
    for (const cplx& v : state.x.values()) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", v.real(), v.imag());
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace sdese
