#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oracles.hpp"
#include "regen/levy_model.hpp"
#include "regen/random.hpp"
#include "regen/special_math.hpp"

using namespace regen;

namespace {
const LevyModel gamma11 = LevyModel::gamma(1, 1);
const LevyModel gl11 = LevyModel::gamma_like(1, 1);
const LevyModel cp_exp1 = LevyModel::compound_poisson(JumpDistribution::exponential(1));
}  // namespace

TEST_SUITE("levy_models") {

TEST_CASE("densities") {
  CHECK(nu_density(gamma11, 1.0) == doctest::Approx(0.3678794).epsilon(1e-7));
  CHECK(nu_density(gl11, 1.0) == doctest::Approx(0.5819767).epsilon(1e-7));
  CHECK_THROWS_AS(nu_density(gamma11, 0.0), std::domain_error);
  CHECK_THROWS_AS(nu_density(cp_exp1, 1.0), std::invalid_argument);
  CHECK(gamma11.tilted_density(1e-12) == doctest::Approx(1.0));
}

TEST_CASE("phi against frozen high-precision values") {
  CHECK(phi(gamma11, 0.0) == 0.0);
  CHECK(phi(cp_exp1, 0.0) == 0.0);
  CHECK(std::abs(phi(gamma11, 1e3, PhiMethod::quadrature) - oracle::frozen::phi_gamma_1_1_at_1e3) < 1e-9);
  CHECK(std::abs(phi(gamma11, 1e6, PhiMethod::quadrature) - oracle::frozen::phi_gamma_1_1_at_1e6) < 1e-8);
  CHECK(std::abs(phi(LevyModel::gamma(2, 3), 50, PhiMethod::quadrature) -
                 oracle::frozen::phi_gamma_2_3_at_50) < 1e-9);
  CHECK(std::abs(phi(LevyModel::gamma_like(1, 2), 1e4, PhiMethod::quadrature) -
                 oracle::frozen::phi_gammalike_1_2_at_1e4) < 1e-9);
  CHECK(std::abs(phi(LevyModel::gamma_like(0.5, 0.7), 100, PhiMethod::quadrature) -
                 oracle::frozen::phi_gammalike_05_07_at_1e2) < 1e-9);
}

TEST_CASE("gammalike expansion at 1e6") {
  const double value = phi(gl11, 1e6, PhiMethod::quadrature);
  CHECK(std::abs(value - 14.39273) < 1e-3);
  CHECK(std::abs(value - (std::log(1e6) + std::numbers::egamma)) < 1e-5);
}

TEST_CASE("gamma expansion constant is -theta log lambda") {
  // The high-precision oracle at t = 1e6 equals log t to 1e-9 for lambda = 1.
  for (double lambda : {0.5, 1.0, 2.0, 3.0}) {
    const LevyModel m = LevyModel::gamma(1.5, lambda);
    const double t = 1e6;
    CAPTURE(lambda);
    CHECK(std::abs(phi(m, t, PhiMethod::quadrature) - 1.5 * (std::log(t) - std::log(lambda))) < 1e-5);
    CHECK(phi_asymptotic(m, t) == doctest::Approx(1.5 * (std::log(t) - std::log(lambda))));
  }
}

TEST_CASE("automatic method switches only where the expansion agrees") {
  for (const LevyModel& m : {gamma11, gl11, LevyModel::gamma_like(2, 0.5)}) {
    CHECK(std::isfinite(m.phi_crossover()));
    const double t = m.phi_crossover() * 2;
    CHECK(std::abs(phi(m, t) - phi(m, t, PhiMethod::quadrature)) < 1e-6);
  }
}

TEST_CASE("phi log-derivative tends to beta ell") {
  CHECK(std::abs(phi_log_derivative(gamma11, 20.0) - 1.0) < 0.05);
  CHECK(std::abs(phi_log_derivative(LevyModel::gamma_like(3, 2), 25.0) - 3.0) < 1e-6);
  // finite difference of phi in log scale
  const double t = 4.0, h = 1e-4;
  const double fd = (phi(gl11, std::exp(t + h)) - phi(gl11, std::exp(t - h))) / (2 * h);
  CHECK(phi_log_derivative(gl11, t) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("phi is nondecreasing and concave (property)") {
  RandomStream rng(7, 1);
  for (const LevyModel& m : {gamma11, gl11, cp_exp1, LevyModel::gamma(0.3, 4.0),
                             LevyModel::compound_poisson(JumpDistribution::deterministic(0.5))}) {
    for (int trial = 0; trial < 25; ++trial) {
      const double a = std::exp(-3 + 15 * rng.uniform());
      const double b = a * (1 + 3 * rng.uniform());
      const double c = 0.5 * (a + b);
      const double pa = phi(m, a, PhiMethod::quadrature), pb = phi(m, b, PhiMethod::quadrature),
                   pc = phi(m, c, PhiMethod::quadrature);
      CAPTURE(m.descriptor());
      CAPTURE(a);
      CHECK(pb >= pa - 1e-12 * pb);
      CHECK(pc >= 0.5 * (pa + pb) - 1e-10 * pc);
    }
  }
}

TEST_CASE("compound Poisson phi is bounded by the total mass") {
  CHECK(phi(cp_exp1, 1e12, PhiMethod::quadrature) <= 1.0 + 1e-12);
  CHECK(phi(cp_exp1, 1e12, PhiMethod::quadrature) > 0.999);
}

TEST_CASE("moments closed forms vs quadrature and series") {
  const ModelMoments g = moments(LevyModel::gamma(2, 3));
  CHECK(g.mu == doctest::Approx(2.0 / 3));
  CHECK(g.sigma2 == doctest::Approx(2.0 / 9));
  const ModelMoments l = moments(gl11);
  CHECK(std::abs(l.mu - oracle::zeta(2)) < 1e-10);
  CHECK(std::abs(l.sigma2 - 2 * oracle::zeta(3)) < 1e-10);
  const ModelMoments c = moments(cp_exp1);
  CHECK(c.mu == doctest::Approx(1.0));
  CHECK(c.sigma2 == doctest::Approx(2.0));
  for (const LevyModel& m : {LevyModel::gamma(2, 3), LevyModel::gamma_like(0.5, 0.7),
                             LevyModel::gamma_like(3, 2)}) {
    const ModelMoments a = moments(m), q = moments_quadrature(m);
    CHECK(std::abs(a.mu - q.mu) < 1e-8 * a.mu);
    CHECK(std::abs(a.sigma2 - q.sigma2) < 1e-8 * a.sigma2);
  }
  const JumpDistribution tab = JumpDistribution::table({0.5, 2.0}, {1, 3});
  CHECK(tab.mean() == doctest::Approx(0.25 * 0.5 + 0.75 * 2.0));
  CHECK(tab.second_moment() == doctest::Approx(0.25 * 0.25 + 0.75 * 4.0));
}

TEST_CASE("laplace exponent at integers") {
  CHECK(laplace_exponent_int(gamma11, 0) == 0.0);
  CHECK(laplace_exponent_int(gamma11, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(laplace_exponent_int(gl11, 1) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::uint64_t n : {1u, 2u, 7u, 64u, 500u}) {
    CAPTURE(n);
    CHECK(laplace_exponent_int(gl11, n) == doctest::Approx(oracle::gammalike_laplace(1, 1, n)).epsilon(1e-13));
    for (const LevyModel& m : {gamma11, LevyModel::gamma_like(2, 0.4), cp_exp1}) {
      const double a = laplace_exponent_int(m, n);
      CHECK(std::abs(a - laplace_exponent_quadrature(m, static_cast<double>(n))) < 1e-9 * a);
    }
  }
}

TEST_CASE("centering and normalizations") {
  CHECK(centering(gamma11, 1.0) == doctest::Approx(0.0));
  const double tolerances[] = {0.10, 0.03, 0.01};
  int i = 0;
  for (double n : {1e3, 1e6, 1e9}) {
    const double L = std::log(n);
    CHECK(std::abs(centering(gamma11, n) / (L * L / 2) - 1) < tolerances[i++]);
  }
  const std::vector<double> grid{10.0, 100.0, 1e4};
  const std::vector<double> acc = centering_grid(gl11, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(acc[k] == doctest::Approx(centering(gl11, grid[k])).epsilon(1e-10));
  CHECK_THROWS(centering_grid(gl11, {100.0, 10.0}));

  const double n = 1e6;
  const ModelMoments mm = moments(gl11);
  const double clt = std::sqrt(mm.sigma2 * std::pow(mm.mu, -3) * std::log(n)) * phi(gl11, n);
  CHECK(theorem_normalization(gl11, n, NormalizationVariant::clt) == doctest::Approx(clt).epsilon(1e-8));
  const double lil = std::sqrt(2 * mm.sigma2 * std::pow(mm.mu, -3) / 3 * std::log(n) *
                               std::log(std::log(std::log(n)))) * phi(gl11, n);
  CHECK(theorem_normalization(gl11, n, NormalizationVariant::lil) == doctest::Approx(lil).epsilon(1e-8));
  CHECK_THROWS_AS(theorem_normalization(gl11, 10.0, NormalizationVariant::lil), std::domain_error);
  CHECK_THROWS_AS(theorem_normalization(gl11, 1.0, NormalizationVariant::clt), std::domain_error);
}

TEST_CASE("de Haan increments") {
  const auto unit = check_de_haan(gamma11, {1.0}, {1e3});
  CHECK(unit.at(0).difference_ratio == 0.0);
  const auto g = check_de_haan(gamma11, {2.0}, {1e8});
  CHECK(std::abs(g.at(0).difference_ratio - std::log(2.0)) < 1e-3);
  const auto l = check_de_haan(gl11, {std::numbers::e}, {1e8});
  CHECK(std::abs(l.at(0).difference_ratio - 1.0) < 1e-3);
  CHECK(std::abs(l.at(0).derivative_ratio - 1.0) < 1e-3);
}

TEST_CASE("compound Poisson functionals") {
  const JumpDistribution e1 = JumpDistribution::exponential(1);
  // |log(1 - e^{-xi})| is exponential(1) when xi is.
  CHECK(cp_hitting_cdf(e1, 2.0) == doctest::Approx(1 - std::exp(-2.0)).epsilon(1e-10));
  CHECK(cp_centering(e1, 10.0) == doctest::Approx(10 - 1 + std::exp(-10.0)).epsilon(1e-9));
  CHECK(cp_lil_normalization(e1, 100.0) ==
        doctest::Approx(std::sqrt(2 * 100 * std::log(std::log(100.0)))).epsilon(1e-12));
  CHECK_THROWS_AS(cp_lil_normalization(e1, 2.0), std::domain_error);
}

TEST_CASE("descriptors round-trip") {
  for (const char* d : {"kind=gamma theta=1 lambda=1", "kind=gammalike theta=2.5 lambda=0.25",
                        "kind=cp jump=exp rate=3", "kind=cp jump=det value=0.5",
                        "kind=cp jump=table atoms=0.5/0.25,2/0.75"}) {
    const LevyModel m = LevyModel::parse(d);
    const LevyModel again = LevyModel::parse(m.descriptor());
    CHECK(again.descriptor() == m.descriptor());
  }
  CHECK_THROWS(LevyModel::parse("kind=gamma theta=1"));
  CHECK_THROWS(LevyModel::parse("kind=gamma theta=-1 lambda=1"));
  CHECK_THROWS(LevyModel::parse("kind=cp jump=exp rate=1 extra=2"));
  CHECK_THROWS(LevyModel::parse("kind=banana"));
  CHECK_THROWS(JumpDistribution::table({1.0}, {0.0}));
  CHECK(JumpDistribution::parse("table:1/1,3/3").weights()[1] == doctest::Approx(0.75));
}

TEST_CASE("beta index") {
  CHECK(gamma11.beta() == 1.0);
  CHECK(gl11.beta() == 1.0);
  CHECK_THROWS(cp_exp1.beta());
}

}  // TEST_SUITE
