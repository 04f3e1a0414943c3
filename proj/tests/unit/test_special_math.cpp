#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oracles.hpp"
#include "regen/quadrature.hpp"
#include "regen/special_math.hpp"

using namespace regen;

TEST_SUITE("special_math") {

TEST_CASE("polygamma at one matches zeta series") {
  CHECK(polygamma(0, 1.0) == doctest::Approx(-std::numbers::egamma).epsilon(1e-14));
  CHECK(std::abs(polygamma(1, 1.0) - oracle::zeta(2.0)) < 1e-12);
  CHECK(std::abs(polygamma(2, 1.0) + 2.0 * oracle::zeta(3.0)) < 1e-12);
  CHECK(polygamma(0, 3.0) == doctest::Approx(-std::numbers::egamma + 1.5).epsilon(1e-14));
}

TEST_CASE("trigamma and tetragamma agree with shifted series") {
  for (double x : {0.05, 0.5, 0.7, 1.3, 2.0, 3.0, 7.5, 40.0, 1e3}) {
    CAPTURE(x);
    CHECK(std::abs(trigamma(x) / oracle::polygamma_series(1, x) - 1.0) < 1e-11);
    CHECK(std::abs(tetragamma(x) / oracle::polygamma_series(2, x) - 1.0) < 1e-11);
  }
}

TEST_CASE("recurrences hold across scales") {
  for (double s : {1e-3, 0.25, 1.0, 4.5, 123.0, 1e6}) {
    CAPTURE(s);
    CHECK(std::abs(digamma(s + 1) - digamma(s) - 1 / s) <= 1e-12 * (1 + 1 / s));
    CHECK(std::abs(trigamma(s) - trigamma(s + 1) - 1 / (s * s)) <= 1e-12 * (1 + 1 / (s * s)));
    CHECK(std::abs(tetragamma(s + 1) - tetragamma(s) - 2 / (s * s * s)) <=
          1e-11 * (1 + 2 / (s * s * s)));
  }
}

TEST_CASE("digamma integral representation") {
  for (double s : {0.3, 1.0, 2.0, 3.0, 9.0}) {
    CAPTURE(s);
    const double direct = -std::numbers::egamma +
                          oracle::tanh_sinh([s](double u) { return (1 - std::pow(u, s - 1)) / (1 - u); },
                                            0.0, 1.0);
    CHECK(std::abs(digamma_integral(s) - direct) < 1e-9);
    CHECK(std::abs(digamma(s) - direct) < 1e-9);
  }
}

TEST_CASE("polygamma domain errors") {
  CHECK_THROWS_AS(polygamma(0, 0.0), std::domain_error);
  CHECK_THROWS_AS(polygamma(1, -2.0), std::domain_error);
  CHECK_THROWS_AS(polygamma(3, 1.0), std::domain_error);
  CHECK_THROWS_AS(polygamma(0, NAN), std::domain_error);
}

TEST_CASE("log_beta examples and gamma-ratio oracle") {
  CHECK(log_beta(1, 1) == doctest::Approx(0.0));
  CHECK(log_beta(1, 2) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(log_beta(2, 3) == doctest::Approx(std::log(1.0 / 12)).epsilon(1e-14));
  for (double a : {0.1, 1.5, 30.0, 1e4})
    for (double b : {0.2, 2.0, 700.0}) {
      const double ref = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
      CHECK(std::abs(log_beta(a, b) - ref) < 1e-9 * (1 + std::abs(ref)));
      CHECK(log_beta(a, b) == doctest::Approx(log_beta(b, a)).epsilon(1e-15));
    }
  CHECK_THROWS_AS(log_beta(0, 1), std::domain_error);
  CHECK_THROWS_AS(log_beta(1, -1), std::domain_error);
}

TEST_CASE("log_binomial") {
  CHECK(std::exp(log_binomial(10, 3)) == doctest::Approx(120.0).epsilon(1e-12));
  CHECK(log_binomial(7, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(log_binomial(3, 4), std::domain_error);
}

TEST_CASE("cancellation-free helpers") {
  CHECK(one_minus_exp_over(0.0) == doctest::Approx(1.0));
  CHECK(one_minus_exp_over(1e-12) == doctest::Approx(1.0 - 5e-13).epsilon(1e-15));
  CHECK(one_minus_exp_over(2.0) == doctest::Approx((1 - std::exp(-2.0)) / 2).epsilon(1e-15));
  CHECK(y_over_neglog1m(1e-10) == doctest::Approx(1.0 - 5e-11).epsilon(1e-15));
  CHECK(y_over_neglog1m(0.5) == doctest::Approx(0.5 / std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("adaptive quadrature examples") {
  CHECK(integrate_adaptive([](double x) { return x; }, 0.0, 1.0) == doctest::Approx(0.5));
  QuadratureConfig tail;
  tail.transform = QuadratureTransform::exp_tail;
  const double frullani = integrate_adaptive(
      [](double x) { return x == 0 ? 1.0 : (std::exp(-x) - std::exp(-2 * x)) / x; }, 0.0,
      INFINITY, tail);
  CHECK(std::abs(frullani - std::log(2.0)) < 1e-9);
  const double poly =
      integrate_adaptive([](double y) { return (1 - (1 - y) * (1 - y)) / y; }, 0.0, 1.0);
  CHECK(std::abs(poly - 1.5) < 1e-12);
}

TEST_CASE("quadrature non-convergence carries the estimate") {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 2;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-15;
  try {
    integrate_adaptive([](double x) { return std::sin(1 / x) / std::sqrt(x); }, 1e-6, 1.0, cfg);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(std::isfinite(e.estimate()));
    CHECK(e.error_bound() > 0.0);
  }
  QuadratureConfig bad;
  bad.abs_tol = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

}  // TEST_SUITE
