// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

namespace sdese {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Exponential integral Ei(x) = -PV int_{-x}^inf e^{-u}/u du.
///
/// Relative accuracy is better than 1e-10 for x < 0 and for x > 0 away from
/// the root near 0.3725, where the error is absolute (~1e-16). Throws
/// ErrorCode::domain for x == 0 and ErrorCode::overflow for |x| > 700.
double expint_ei(double x);

}  // namespace sdese
