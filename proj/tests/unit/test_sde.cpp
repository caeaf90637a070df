// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "sdese/error.hpp"
#include "sdese/sde.hpp"

using namespace sdese;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_SUITE("sde_core") {
  TEST_CASE("spec invariants") {
    CHECK(code_of([] { SdeSpec::ouve(0.0); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { SdeSpec::ouve(0.1, 1.5, -1.0); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { SdeSpec::ouve(0.1, 0.0); }) == ErrorCode::invalid_argument);
    // gamma + ln k = 0
    CHECK(code_of([] { SdeSpec::ouve(0.1, 1.0, std::exp(-1.0)); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { SdeSpec::bbed(0.1, 2.6, 1.0); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { SdeSpec::bbed(0.1, 2.6, 0.0); }) == ErrorCode::invalid_argument);
    // OUVE horizon is not bounded by 1.
    CHECK_NOTHROW(SdeSpec::ouve(0.1, 1.5, 10.0, 3.0));
  }

  TEST_CASE("defaults") {
    const SdeSpec o = SdeSpec::defaults(SdeKind::ouve);
    CHECK(o.gamma() == 1.5);
    CHECK(o.k() == 10.0);
    CHECK(o.T() == 1.0);
    const SdeSpec b = SdeSpec::defaults(SdeKind::bbed);
    CHECK(b.k() == 2.6);
    CHECK(b.T() == 0.999);
  }

  TEST_CASE("drift examples") {
    const auto zero = ComplexGrid::scalar(0.0);
    const auto one = ComplexGrid::scalar(1.0);
    CHECK(drift(SdeSpec::ouve(), one, one, 0.3)[0] == cplx(0.0));
    CHECK(drift(SdeSpec::bbed(), zero, one, 0.5)[0] == cplx(2.0));
    CHECK(drift(SdeSpec::ouve(), zero, one, 0.5)[0] == cplx(1.5));
    CHECK(code_of([&] { drift(SdeSpec::bbed(), zero, one, 1.0 - 1e-7); }) ==
          ErrorCode::singularity);
    CHECK(code_of([&] { drift(SdeSpec::ouve(), zero, ComplexGrid(2, 1), 0.5); }) ==
          ErrorCode::shape_mismatch);
  }

  TEST_CASE("diffusion examples") {
    CHECK(diffusion(SdeSpec::ouve(0.18), 0.0) == doctest::Approx(std::sqrt(0.18)).epsilon(1e-15));
    CHECK(diffusion(SdeSpec::bbed(0.08), 1.0) == doctest::Approx(0.7353910524340094).epsilon(1e-14));
    for (double t : {0.0, 0.3, 0.9}) CHECK(diffusion(SdeSpec::bbed(1.0, 1.0), t) == 1.0);
  }

  TEST_CASE("kernel mean") {
    const auto x0 = ComplexGrid::scalar({0.4, -0.2});
    const auto y = ComplexGrid::scalar({-0.6, 1.0});
    const KernelMoments b = kernel_moments(SdeSpec::bbed(), x0, y, 0.5);
    CHECK(std::abs(b.mean[0] - (0.5 * x0[0] + 0.5 * y[0])) < 1e-15);
    for (const SdeSpec& s : {SdeSpec::ouve(), SdeSpec::bbed()}) {
      const KernelMoments m = kernel_moments(s, x0, y, 0.0);
      CHECK(m.mean[0] == x0[0]);
      CHECK(m.std == 0.0);
    }
    const KernelMoments o = kernel_moments(SdeSpec::ouve(), x0, y, 0.7);
    const double e = std::exp(-1.5 * 0.7);
    CHECK(std::abs(o.mean[0] - (e * x0[0] + (1 - e) * y[0])) < 1e-15);
    CHECK(code_of([&] { kernel_moments(SdeSpec::bbed(), x0, y, 0.9995); }) == ErrorCode::domain);
    CHECK(code_of([&] { kernel_moments(SdeSpec::ouve(), x0, y, -0.1); }) == ErrorCode::domain);
  }

  TEST_CASE("variance matches quadrature of the linear-SDE integral") {
    for (double t : {1e-4, 0.01, 0.25, 0.5, 0.75, 1.0}) {
      const double want = oracle::variance_quadrature(false, 1.5, 0.18, 10.0, t);
      CHECK(kernel_variance(SdeSpec::ouve(), t) == doctest::Approx(want).epsilon(1e-11));
    }
    for (double k : {1.5, 2.6, 10.0}) {
      for (double t : {1e-4, 0.01, 0.25, 0.5, 0.9, 0.99, 0.999}) {
        const double want = oracle::variance_quadrature(true, 0.0, 0.08, k, t);
        CHECK(kernel_variance(SdeSpec::bbed(0.08, k), t) == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("BBED variance with k = 1 reduces to c t (1 - t)") {
    const SdeSpec s = SdeSpec::bbed(0.3, 1.0);
    for (double t : {0.1, 0.5, 0.9}) {
      CHECK(kernel_variance(s, t) == doctest::Approx(0.3 * t * (1 - t)).epsilon(1e-13));
    }
  }

  TEST_CASE("variance shape") {
    CHECK(kernel_variance(SdeSpec::ouve(), 0.0) == 0.0);
    CHECK(kernel_variance(SdeSpec::bbed(), 0.0) == 0.0);
    CHECK(kernel_variance(SdeSpec::bbed(), 0.9999 * 0.999) < kernel_variance(SdeSpec::bbed(), 0.5));
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double v = kernel_variance(SdeSpec::ouve(), i / 1000.0);
      CHECK(v > prev);
      prev = v;
    }
    CHECK(kernel_variance(SdeSpec::bbed(), 0.2) < kernel_variance(SdeSpec::bbed(), 0.6));
    CHECK(kernel_variance(SdeSpec::bbed(), 0.6) > kernel_variance(SdeSpec::bbed(), 0.999));
  }

  TEST_CASE("variance scales linearly in c") {
    for (double t : {0.05, 0.4, 0.8, 0.999}) {
      const double r_o = kernel_variance(SdeSpec::ouve(0.36), t) / kernel_variance(SdeSpec::ouve(0.18), t);
      const double r_b = kernel_variance(SdeSpec::bbed(0.16), t) / kernel_variance(SdeSpec::bbed(0.08), t);
      CHECK(std::abs(r_o - 2.0) < 1e-12);
      CHECK(std::abs(r_b - 2.0) < 1e-12);
    }
  }

  TEST_CASE("sample_perturbation") {
    const auto x0 = ComplexGrid(3, 2, cplx{0.3, 0.1});
    const auto y = ComplexGrid(3, 2, cplx{-0.5, 0.2});
    RandomSource rng(5);
    CHECK(sample_perturbation(SdeSpec::bbed(), x0, y, 0.0, rng) == x0);
    RandomSource a(11);
    RandomSource b(11);
    CHECK(sample_perturbation(SdeSpec::ouve(), x0, y, 0.5, a) ==
          sample_perturbation(SdeSpec::ouve(), x0, y, 0.5, b));

    // Per-coefficient sample variance against sigma^2, 3 standard errors.
    const SdeSpec spec = SdeSpec::bbed();
    const auto sx = ComplexGrid::scalar({0.3, 0.0});
    const auto sy = ComplexGrid::scalar({0.1, 0.0});
    const double t = 0.5;
    const double var = kernel_variance(spec, t);
    const cplx mean = kernel_moments(spec, sx, sy, t).mean[0];
    RandomSource r(2024);
    const int n = 100000;
    double acc = 0.0;
    double acc2 = 0.0;
    double re2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const cplx d = sample_perturbation(spec, sx, sy, t, r)[0] - mean;
      const double e = std::norm(d);
      acc += e;
      acc2 += e * e;
      re2 += d.real() * d.real();
    }
    const double m = acc / n;
    const double se = std::sqrt((acc2 / n - m * m) / n);
    CHECK(std::abs(m - var) < 3 * se);
    // Real part carries half of the variance.
    CHECK(std::abs(re2 / n - var / 2) < 4 * var / std::sqrt(2.0 * n));
  }

  TEST_CASE("prior mismatch") {
    const auto x0 = ComplexGrid(2, 2, cplx{1.0, 0.5});
    const auto y = ComplexGrid(2, 2, cplx{0.25, -0.5});
    const double d = (x0 - y).norm();
    const double pb = prior_mismatch(SdeSpec::bbed(), x0, y);
    CHECK(std::abs(pb - (1.0 - 0.999) * d) <= 4 * std::numeric_limits<double>::epsilon() * pb);
    CHECK(prior_mismatch(SdeSpec::ouve(), ComplexGrid::scalar(1.0), ComplexGrid::scalar(0.0)) ==
          doctest::Approx(0.22313016014842982).epsilon(1e-14));
    CHECK(pb < prior_mismatch(SdeSpec::ouve(), x0, y));
    CHECK(prior_mismatch(SdeSpec::bbed(), x0, x0) == 0.0);
    CHECK(prior_mismatch(SdeSpec::ouve(), x0, x0) == 0.0);
  }

  TEST_CASE("config round trip and parse errors") {
    for (const SdeSpec& s : {SdeSpec::ouve(0.73), SdeSpec::bbed(0.51, 3.0, 0.99)}) {
      CHECK(SdeSpec::from_config(s.to_config()) == s);
    }
    const SdeSpec p = SdeSpec::from_config("# comment\nkind = ouve\nc = 0.2  # inline\n");
    CHECK(p == SdeSpec::ouve(0.2));
    CHECK(code_of([] { SdeSpec::from_config("kind = bbed\nfoo = 1\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { SdeSpec::from_config("c = 0.1\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { SdeSpec::from_config("kind = bbed\nc = abc\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { SdeSpec::from_config("kind = vp\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { SdeSpec::from_config("kind = bbed\nT = 1.5\n"); }) ==
          ErrorCode::invalid_argument);
  }
}
