#pragma once

#include <numbers>

namespace regen {

inline constexpr double kEulerGamma = std::numbers::egamma;

/// Polygamma function of order k in {0, 1, 2}: digamma, trigamma,
/// tetragamma. Argument shifted to s >= 8 by the recurrence, then an
/// asymptotic series. Throws std::domain_error for s <= 0 or other k.
double polygamma(int order, double s);

inline double digamma(double s) { return polygamma(0, s); }
inline double trigamma(double s) { return polygamma(1, s); }
inline double tetragamma(double s) { return polygamma(2, s); }

/// Digamma through its integral representation
///   psi(s) = -gamma + int_0^1 (1 - (1 - y)^(s - 1)) / y dy,
/// evaluated with adaptive quadrature. Slow; used for cross-checks.
double digamma_integral(double s);

/// log Gamma for positive arguments (reentrant).
double log_gamma(double x);

/// log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b).
double log_beta(double a, double b);

/// log C(n, k) for 0 <= k <= n.
double log_binomial(double n, double k);

/// (1 - exp(-z)) / z, continuous at 0 with value 1.
double one_minus_exp_over(double z);

/// y / (-log(1 - y)) on [0, 1), continuous at 0 with value 1.
double y_over_neglog1m(double y);

}  // namespace regen
