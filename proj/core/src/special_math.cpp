#include "regen/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "regen/quadrature.hpp"

namespace regen {

namespace {

constexpr double kShift = 8.0;

// Asymptotic series in 1/s for s >= kShift. Coefficients come from the
// Bernoulli numbers B_2 .. B_14.
double digamma_large(double s) {
  const double r = 1.0 / (s * s);
  const double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 -
                r * (1.0 / 252 -
                     r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
  return std::log(s) - 0.5 / s - series;
}

double trigamma_large(double s) {
  const double r = 1.0 / (s * s);
  const double series =
      r * (1.0 / 6 -
           r * (1.0 / 30 -
                r * (1.0 / 42 -
                     r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730 - r * 7.0 / 6))))));
  return 1.0 / s + 0.5 * r + series / s;
}

double tetragamma_large(double s) {
  const double r = 1.0 / (s * s);
  const double series =
      r * (0.5 -
           r * (1.0 / 6 -
                r * (1.0 / 6 -
                     r * (3.0 / 10 - r * (5.0 / 6 - r * (691.0 / 210 - r * 35.0 / 2))))));
  return -r - r / s - series * r;
}

}  // namespace

double polygamma(int order, double s) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::domain_error("polygamma: argument must be finite and > 0, got " +
                            std::to_string(s));
  double acc = 0.0;
  switch (order) {
    case 0:
      while (s < kShift) {
        acc -= 1.0 / s;
        s += 1.0;
      }
      return acc + digamma_large(s);
    case 1:
      while (s < kShift) {
        acc += 1.0 / (s * s);
        s += 1.0;
      }
      return acc + trigamma_large(s);
    case 2:
      while (s < kShift) {
        acc -= 2.0 / (s * s * s);
        s += 1.0;
      }
      return acc + tetragamma_large(s);
    default:
      throw std::domain_error("polygamma: order must be 0, 1 or 2, got " +
                              std::to_string(order));
  }
}

double digamma_integral(double s) {
  if (!(s > 0.0)) throw std::domain_error("digamma_integral: argument must be > 0");
  // y = 1 - exp(-x) turns the integrand into (e^{-x} - e^{-sx}) / (1 - e^{-x}).
  const Integrand f = [s](double x) {
    if (x == 0.0) return s - 1.0;
    return -std::exp(-x) * std::expm1(-(s - 1.0) * x) / -std::expm1(-x);
  };
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.rel_tol = 1e-13;
  cfg.transform = QuadratureTransform::exp_tail;
  cfg.tail_rate = 0.5 * std::min(1.0, s);
  return -kEulerGamma + integrate_adaptive(f, 0.0, INFINITY, cfg);
}

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("log_beta: arguments must be > 0");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double log_binomial(double n, double k) {
  if (k < 0.0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double one_minus_exp_over(double z) {
  if (std::abs(z) < 1e-5) return 1.0 - z * (0.5 - z / 6.0);
  return -std::expm1(-z) / z;
}

double y_over_neglog1m(double y) {
  if (y == 0.0) return 1.0;
  return y / -std::log1p(-y);
}

}  // namespace regen
