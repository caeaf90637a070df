// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "sdese/error.hpp"
#include "sdese/score.hpp"

using namespace sdese;

namespace {

std::vector<TrainingPair> gaussian_batch(const GaussianTask& task, const ComplexGrid& y, int n,
                                         RandomSource& rng) {
  std::vector<TrainingPair> out;
  for (int i = 0; i < n; ++i) {
    ComplexGrid x0 = rng.complex_normal_like(task.m0);
    x0 *= std::sqrt(task.s0sq);
    x0 += task.m0;
    out.push_back({std::move(x0), y});
  }
  return out;
}

ScoreFunction scaled(const ScoreFunction& s, double lambda) {
  return [s, lambda](const ComplexGrid& x, const ComplexGrid& y, double t) {
    return s(x, y, t) * lambda;
  };
}

}  // namespace

TEST_SUITE("score") {
  TEST_CASE("score vanishes at the marginal mean") {
    const GaussianTask task{ComplexGrid(2, 2, cplx{0.3, -0.1}), 0.2, SdeSpec::bbed()};
    const auto y = ComplexGrid(2, 2, cplx{0.6, 0.4});
    const ScoreFunction s = analytic_gaussian_score(task);
    for (double t : {0.1, 0.5, 0.9}) {
      CHECK(s(marginal_mean(task, y, t), y, t).norm() < 1e-12);
    }
  }

  TEST_CASE("point-mass prior reduces to the conditional kernel score") {
    const auto m0 = ComplexGrid::scalar({0.4, 0.2});
    const auto y = ComplexGrid::scalar({-0.1, 0.3});
    const auto x = ComplexGrid::scalar({0.7, -0.5});
    for (const SdeSpec& spec : {SdeSpec::ouve(), SdeSpec::bbed()}) {
      const ScoreFunction s = analytic_gaussian_score({m0, 0.0, spec});
      const double t = 0.4;
      const KernelMoments km = kernel_moments(spec, m0, y, t);
      const cplx want = -(x[0] - km.mean[0]) / (km.std * km.std);
      CHECK(std::abs(s(x, y, t)[0] - want) < 1e-12 * std::abs(want));
    }
  }

  TEST_CASE("score is the conjugate gradient of the quadrature marginal") {
    // Real part of X_t: N(a w + b Re y, sigma^2/2) with w ~ N(Re m0, s0sq/2).
    const SdeSpec spec = SdeSpec::ouve();
    const double t = 0.35;
    const double s0sq = 0.3;
    const cplx m0{0.2, 0.0};
    const cplx yv{0.8, 0.0};
    const GaussianTask task{ComplexGrid::scalar(m0), s0sq, spec};
    const auto [a, b] = mean_coefficients(spec, t);
    const double kv = kernel_variance(spec, t);
    auto density = [&](double u) {
      auto f = [&](double w) {
        const double v1 = kv / 2;
        const double v2 = s0sq / 2;
        const double d1 = u - a * w - b * yv.real();
        const double d2 = w - m0.real();
        return std::exp(-d1 * d1 / (2 * v1) - d2 * d2 / (2 * v2)) /
               (2 * std::numbers::pi * std::sqrt(v1 * v2));
      };
      return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -10.0, 10.0, 15,
                                                                           1e-13);
    };
    const ScoreFunction s = analytic_gaussian_score(task);
    const double h = 1e-4;
    for (double u : {-0.5, 0.1, 0.6, 1.2}) {
      const double dlog = (std::log(density(u + h)) - std::log(density(u - h))) / (2 * h);
      const double got = s(ComplexGrid::scalar({u, 0.0}), ComplexGrid::scalar(yv), t)[0].real();
      CHECK(got == doctest::Approx(0.5 * dlog).epsilon(1e-6));
    }
  }

  TEST_CASE("score magnitude grows like 1/sigma as t -> 0 for a point mass") {
    const SdeSpec spec = SdeSpec::bbed();
    const auto m0 = ComplexGrid::scalar(0.0);
    const auto y = ComplexGrid::scalar(0.0);
    const ScoreFunction s = analytic_gaussian_score({m0, 0.0, spec});
    for (double t : {1e-2, 1e-3, 1e-4}) {
      const double sigma = std::sqrt(kernel_variance(spec, t));
      // At a typical point x = sigma the score is exactly -1/sigma.
      const cplx v = s(ComplexGrid::scalar(sigma), y, t)[0];
      CHECK(std::abs(v) * sigma == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("dsm loss of the exact conditional score is zero") {
    const SdeSpec spec = SdeSpec::bbed();
    const auto x0 = ComplexGrid(3, 2, cplx{0.4, 0.1});
    const auto y = ComplexGrid(3, 2, cplx{0.1, -0.2});
    const ScoreFunction s = analytic_gaussian_score({x0, 0.0, spec});
    RandomSource rng(2);
    const std::vector<TrainingPair> batch = {{x0, y}};
    CHECK(dsm_loss(s, spec, batch, 500, rng) < 1e-20);
  }

  TEST_CASE("dsm loss is minimal at the analytic score (common random numbers)") {
    const SdeSpec spec = SdeSpec::ouve();
    const GaussianTask task{ComplexGrid::scalar({0.3, 0.0}), 0.25, spec};
    const auto y = ComplexGrid::scalar({0.7, 0.1});
    RandomSource data(17);
    const auto batch = gaussian_batch(task, y, 200, data);
    const ScoreFunction s = analytic_gaussian_score(task);
    auto loss = [&](const ScoreFunction& f) {
      RandomSource rng(99);
      return dsm_loss(f, spec, batch, 50, rng);
    };
    const double best = loss(s);
    for (double lambda : {0.8, 0.9, 1.1, 1.2}) CHECK(loss(scaled(s, lambda)) > best);
    for (double d : {-0.3, 0.3}) {
      const ScoreFunction shifted = [s, d](const ComplexGrid& x, const ComplexGrid& yy, double t) {
        ComplexGrid out = s(x, yy, t);
        for (cplx& v : out.values()) v += d;
        return out;
      };
      CHECK(loss(shifted) > best);
    }
  }

  TEST_CASE("zero score loss equals the quadrature of d / sigma^2") {
    const SdeSpec spec = SdeSpec::bbed();
    const auto x0 = ComplexGrid(4, 4, cplx{0.2, 0.0});
    const auto y = ComplexGrid(4, 4, cplx{0.5, 0.0});
    const std::vector<TrainingPair> batch = {{x0, y}};
    const ScoreFunction zero = [](const ComplexGrid& x, const ComplexGrid&, double) {
      return ComplexGrid(x.rows(), x.cols());
    };
    const double lo = kDsmTimeFloor;
    const double d = 16.0;
    const double want =
        d / (spec.T() - lo) *
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double t) { return 1.0 / kernel_variance(spec, t); }, lo, spec.T(), 15, 1e-12);
    // Spread of independent estimates gives the Monte-Carlo standard error.
    const int runs = 20;
    std::vector<double> est;
    for (int r = 0; r < runs; ++r) {
      RandomSource rng(1000 + r);
      est.push_back(dsm_loss(zero, spec, batch, 2000, rng));
    }
    double mean = 0.0;
    for (double e : est) mean += e;
    mean /= runs;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    const double se = std::sqrt(var / (runs - 1) / runs);
    CHECK(std::abs(mean - want) < 4 * se);
  }

  TEST_CASE("dsm loss argument checks") {
    const SdeSpec spec = SdeSpec::bbed();
    const ScoreFunction s = analytic_gaussian_score({ComplexGrid::scalar(0.0), 0.0, spec});
    RandomSource rng(1);
    const std::vector<TrainingPair> empty;
    CHECK_THROWS_AS(dsm_loss(s, spec, empty, 10, rng), Error);
    const std::vector<TrainingPair> one = {{ComplexGrid::scalar(0.0), ComplexGrid::scalar(1.0)}};
    CHECK_THROWS_AS(dsm_loss(s, spec, one, 0, rng), Error);
    CHECK_THROWS_AS(dsm_loss(s, spec, one, 10, rng, 0.0), Error);
    CHECK_THROWS_AS(analytic_gaussian_score({ComplexGrid::scalar(0.0), -1.0, spec}), Error);
  }
}
