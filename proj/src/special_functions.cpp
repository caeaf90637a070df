// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/special_functions.hpp"

#include <cmath>
#include <limits>

#include "sdese/error.hpp"

namespace sdese {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIterations = 1000;

// E1(z) for 0 < z <= 1. Alternating terms stay below 1 here, so the series
// loses no digits to cancellation.
double e1_series(double z) {
  double sum = 0.0;
  double term = 1.0;  // (-z)^n / n!
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= -z / n;
    const double contrib = term / n;
    sum += contrib;
    if (std::abs(contrib) < kEps * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(z) - sum;
}

// E1(z) for z > 1, continued fraction evaluated with the modified Lentz
// method.
double e1_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-z);
}

// Ei(x) for 0 < x <= 40; all terms are positive.
double ei_series(double x) {
  double sum = 0.0;
  double term = 1.0;  // x^n / n!
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / n;
    const double contrib = term / n;
    sum += contrib;
    if (contrib < kEps * sum) break;
  }
  return kEulerGamma + std::log(x) + sum;
}

// Ei(x) for x > 40: e^x / x * sum_k k! / x^k, truncated at the smallest term.
double ei_asymptotic(double x) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < kMaxIterations; ++k) {
    const double next = term * k / x;
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < kEps * sum) break;
  }
  return std::exp(x) / x * sum;
}

}  // namespace

double expint_ei(double x) {
  if (x == 0.0) fail(ErrorCode::domain, "expint_ei: Ei is singular at x = 0");
  if (!(std::abs(x) <= 700.0)) {
    fail(ErrorCode::overflow, "expint_ei: |x| must not exceed 700");
  }
  if (x < 0.0) {
    const double z = -x;
    return z <= 1.0 ? -e1_series(z) : -e1_continued_fraction(z);
  }
  return x <= 40.0 ? ei_series(x) : ei_asymptotic(x);
}

}  // namespace sdese
