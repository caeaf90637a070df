// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sdese/error.hpp"
#include "sdese/score.hpp"
#include "sdese/solvers.hpp"

using namespace sdese;

TEST_SUITE("solvers") {
  TEST_CASE("forward trajectory layout") {
    RandomSource rng(1);
    const auto x0 = ComplexGrid(2, 3, cplx{0.5, 0.0});
    const auto y = ComplexGrid(2, 3, cplx{0.3, 0.1});
    const Trajectory tr = forward_euler_maruyama(SdeSpec::ouve(), x0, y, 0.5, 0.01, rng);
    REQUIRE(tr.size() == 51);
    CHECK(tr.front().t == 0.0);
    CHECK(tr.front().x == x0);
    CHECK(tr.back().t == doctest::Approx(0.5).epsilon(1e-14));
    for (const DiffusionState& s : tr) CHECK(s.x.all_finite());
  }

  TEST_CASE("forward argument checks") {
    RandomSource rng(1);
    const auto x = ComplexGrid::scalar(0.0);
    CHECK_THROWS_AS(forward_euler_maruyama(SdeSpec::ouve(), x, x, 0.5, 0.03, rng), Error);
    CHECK_THROWS_AS(forward_euler_maruyama(SdeSpec::ouve(), x, x, 0.5, 0.0, rng), Error);
    CHECK_THROWS_AS(forward_euler_maruyama(SdeSpec::bbed(), x, x, 0.9995, 0.0005, rng), Error);
    CHECK_THROWS_AS(forward_euler_maruyama(SdeSpec::ouve(), x, ComplexGrid(1, 2), 0.5, 0.1, rng),
                    Error);
  }

  TEST_CASE("Monte-Carlo statistics follow the closed-form kernel") {
    const auto x0 = ComplexGrid::scalar({0.5, 0.0});
    const auto y = ComplexGrid::scalar({0.3, 0.0});
    struct Case {
      SdeSpec spec;
      double t;
    };
    for (const Case& c : {Case{SdeSpec::ouve(), 0.75}, Case{SdeSpec::bbed(), 0.9}}) {
      RandomSource rng(77);
      const KernelStats st = monte_carlo_kernel_stats(c.spec, x0, y, c.t, 20000, 1e-3, rng);
      const KernelMoments m = kernel_moments(c.spec, x0, y, c.t);
      CHECK(st.n_paths == 20000);
      CHECK(std::abs(st.mean[0] - m.mean[0]) < 4 * st.mean_stderr);
      // Euler-Maruyama bias at this step is below 1%.
      CHECK(std::abs(st.var - m.std * m.std) < 4 * st.var_stderr + 0.01 * m.std * m.std);
    }
  }

  TEST_CASE("checkpoint overload agrees with single-time calls and is reproducible") {
    const auto x0 = ComplexGrid::scalar({0.5, 0.0});
    const auto y = ComplexGrid::scalar({0.3, 0.0});
    const double ts[] = {0.0, 0.2, 0.5};
    RandomSource a(9);
    RandomSource b(9);
    const auto one = monte_carlo_kernel_stats(SdeSpec::bbed(), x0, y, ts, 5000, 0.01, a);
    const auto two = monte_carlo_kernel_stats(SdeSpec::bbed(), x0, y, ts, 5000, 0.01, b);
    REQUIRE(one.size() == 3);
    CHECK(one[0].var == 0.0);
    CHECK(one[0].mean == x0);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(one[i].mean == two[i].mean);
      CHECK(one[i].var == two[i].var);
    }
  }

  TEST_CASE("too few paths is rejected") {
    RandomSource rng(1);
    const auto x = ComplexGrid::scalar(0.0);
    CHECK_THROWS_AS(monte_carlo_kernel_stats(SdeSpec::ouve(), x, x, 0.5, 999, 0.01, rng), Error);
  }

  TEST_CASE("reverse sampler reaches the Gaussian posterior") {
    // X0 ~ N_C(0, 1), Y = X0 + N, N ~ N_C(0, 0.5): X0 | Y ~ N_C(Y / 1.5, 1/3).
    const cplx yv{0.9, -0.3};
    const auto y = ComplexGrid::scalar(yv);
    const cplx post_mean = yv / 1.5;
    const double post_var = 1.0 / 3.0;
    for (const SdeSpec& spec : {SdeSpec::ouve(), SdeSpec::bbed()}) {
      const ScoreFunction score =
          analytic_gaussian_score({ComplexGrid::scalar(post_mean), post_var, spec});
      SamplerConfig cfg;
      cfg.t_rsp = spec.T();
      cfg.n_steps = 60;
      RandomSource rng(321);
      const int n = 3000;
      cplx sum = 0.0;
      double sq = 0.0;
      for (int i = 0; i < n; ++i) {
        const cplx v = reverse_euler_maruyama(spec, y, score, cfg, rng)[0];
        sum += v;
        sq += std::norm(v);
      }
      const cplx mean = sum / double(n);
      const double var = sq / n - std::norm(mean);
      CHECK(std::abs(mean - post_mean) < 4 * std::sqrt(post_var / n));
      CHECK(var == doctest::Approx(post_var).epsilon(0.1));
    }
  }

  TEST_CASE("denoise_final removes the last stochastic term") {
    const SdeSpec spec = SdeSpec::bbed();
    const auto y = ComplexGrid::scalar({0.2, 0.0});
    // A zero score keeps the update linear, so the final noise is the only
    // difference between two runs sharing the same earlier draws.
    const ScoreFunction zero = [](const ComplexGrid& x, const ComplexGrid&, double) {
      return ComplexGrid(x.rows(), x.cols());
    };
    SamplerConfig cfg{spec.T(), 1, 4, true};
    const ComplexGrid a = reverse_euler_maruyama(spec, y, zero, cfg);
    const ComplexGrid b = reverse_euler_maruyama(spec, y, zero, cfg);
    CHECK(a == b);
    RandomSource r(4);
    ComplexGrid x0 = r.complex_normal_like(y);
    x0 *= std::sqrt(kernel_variance(spec, spec.T()));
    x0 += y;
    // One step with denoise_final: x - (y - x)/(1 - T) * T.
    const cplx want = x0[0] - (y[0] - x0[0]) / (1 - spec.T()) * spec.T();
    CHECK(std::abs(a[0] - want) < 1e-12 * std::abs(want));
  }

  TEST_CASE("reverse sampler validation and divergence") {
    const SdeSpec spec = SdeSpec::bbed();
    const auto y = ComplexGrid::scalar(0.0);
    const ScoreFunction nan_score = [](const ComplexGrid& x, const ComplexGrid&, double) {
      return ComplexGrid(x.rows(), x.cols(), cplx{std::nan(""), 0.0});
    };
    SamplerConfig cfg;
    cfg.t_rsp = 0.5;
    try {
      reverse_euler_maruyama(spec, y, nan_score, cfg);
      FAIL("expected divergence");
    } catch (const DivergedError& e) {
      CHECK(e.code() == ErrorCode::diverged);
      CHECK(e.time() == 0.5);
    }
    cfg.t_rsp = 1.0;  // above T = 0.999
    CHECK_THROWS_AS(reverse_euler_maruyama(spec, y, nan_score, cfg), Error);
    cfg.t_rsp = 0.5;
    cfg.n_steps = 0;
    CHECK_THROWS_AS(reverse_euler_maruyama(spec, y, nan_score, cfg), Error);
    cfg.n_steps = 10;
    CHECK_THROWS_AS(reverse_euler_maruyama(spec, y, ScoreFunction{}, cfg), Error);
  }

  TEST_CASE("trajectory CSV") {
    RandomSource rng(3);
    const auto x = ComplexGrid(1, 2, cplx{0.1, 0.2});
    const Trajectory tr = forward_euler_maruyama(SdeSpec::ouve(), x, x, 0.1, 0.05, rng);
    std::ostringstream out;
    write_trajectory_csv(tr, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,re_0,im_0,re_1,im_1");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
  }
}
