#include "regen/validation.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>

#include "regen/brownian.hpp"
#include "regen/composition.hpp"
#include "regen/experiment.hpp"
#include "regen/levy_model.hpp"
#include "regen/quadrature.hpp"
#include "regen/special_math.hpp"
#include "regen/statistics.hpp"

namespace regen {

namespace {

using Check = std::function<std::string()>;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

std::string polygamma_recurrence() {
  for (double s : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double err = std::abs(digamma(s + 1.0) - digamma(s) - 1.0 / s);
    if (err > 1e-12) return fmt("s = %g: error %.3g", s, err);
  }
  return {};
}

std::string polygamma_integral() {
  for (double s : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0}) {
    const double err = std::abs(digamma(s) - digamma_integral(s));
    if (err > 1e-8) return fmt("s = %g: error %.3g", s, err);
  }
  return {};
}

std::string frullani() {
  const double pairs[][2] = {{1, 2}, {1, 3}, {2, 5}};
  for (const auto& p : pairs) {
    const double a = p[0], b = p[1];
    const double v = integrate_adaptive(
        [a, b](double x) { return (b - a) * std::exp(-a * x) * one_minus_exp_over((b - a) * x); },
        0.0, INFINITY);
    if (std::abs(v - std::log(b / a)) > 1e-10) return fmt("(%g, %g): got %.15g", a, b, v);
  }
  return {};
}

std::string log_beta_symmetry() {
  for (double a : {0.3, 1.0, 2.5, 40.0})
    for (double b : {0.7, 3.0, 1e4})
      if (log_beta(a, b) != log_beta(b, a)) return fmt("(%g, %g)", a, b);
  return {};
}

std::string phi_shape() {
  for (const LevyModel& m : {LevyModel::gamma(1, 1), LevyModel::gamma_like(2, 0.7),
                             LevyModel::compound_poisson(JumpDistribution::exponential(1))}) {
    double prev = -1.0, prev_diff = INFINITY;
    for (int i = 0; i <= 40; ++i) {
      const double t = 0.5 * i;
      const double v = phi(m, t, PhiMethod::quadrature);
      if (v < prev - 1e-12) return "not nondecreasing for " + m.descriptor();
      if (i > 0) {
        const double diff = v - prev;
        if (diff > prev_diff + 1e-9) return "not concave for " + m.descriptor();
        prev_diff = diff;
      }
      prev = v;
    }
  }
  return {};
}

std::string phi_gamma_convergence() {
  for (const LevyModel& m : {LevyModel::gamma(1, 1), LevyModel::gamma(2, 3),
                             LevyModel::gamma_like(1, 2)}) {
    double prev = INFINITY;
    for (double t : {1e2, 1e3, 1e4, 1e5, 1e6}) {
      const double err = std::abs(phi(m, t, PhiMethod::quadrature) - phi_asymptotic(m, t));
      if (!(err < prev))
        return m.descriptor() + fmt(": error %.3g at t = %g did not decrease", err, t);
      prev = err;
    }
    if (prev > 1e-3 * m.theta() * m.lambda())
      return m.descriptor() + fmt(": error %.3g at 1e6", prev);
  }
  return {};
}

std::string moment_formulas() {
  const double params[][2] = {{1, 1}, {2, 3}, {0.5, 0.7}};
  for (const auto& p : params) {
    for (const LevyModel& m : {LevyModel::gamma(p[0], p[1]), LevyModel::gamma_like(p[0], p[1])}) {
      const ModelMoments a = moments(m), b = moments_quadrature(m);
      if (std::abs(a.mu - b.mu) > 1e-8 || std::abs(a.sigma2 - b.sigma2) > 1e-8)
        return m.descriptor() + fmt(": mu %.12g vs %.12g", a.mu, b.mu);
    }
  }
  return {};
}

std::string laplace_binomial_identity() {
  for (const LevyModel& m : {LevyModel::gamma(1, 1), LevyModel::gamma_like(0.5, 2),
                             LevyModel::compound_poisson(JumpDistribution::exponential(0.7)),
                             LevyModel::compound_poisson(JumpDistribution::deterministic(0.4))}) {
    for (std::uint64_t n : {1, 2, 5, 17, 60}) {
      const double closed = laplace_exponent_int(m, n);
      const double quad = laplace_exponent_quadrature(m, static_cast<double>(n));
      const double rows = decrement_row(m, n).mass() * closed;
      if (std::abs(closed - quad) > 1e-10 || std::abs(rows - closed) > 1e-10)
        return m.descriptor() + fmt(": n = %g closed %.15g rows %.15g", static_cast<double>(n),
                                    closed, rows);
    }
  }
  return {};
}

std::string decrement_mass() {
  for (const LevyModel& m :
       {LevyModel::gamma(1, 1), LevyModel::gamma_like(1, 1),
        LevyModel::compound_poisson(JumpDistribution::exponential(1)),
        LevyModel::compound_poisson(JumpDistribution::table({0.2, 1.5}, {0.3, 0.7}))}) {
    for (std::uint64_t n = 1; n <= 120; n += 7) {
      const double err = std::abs(decrement_row(m, n).mass() - 1.0);
      if (err > 1e-12) return m.descriptor() + fmt(": n = %g error %.3g", static_cast<double>(n), err);
    }
  }
  return {};
}

std::string gammalike_rows_vs_quadrature() {
  const LevyModel m = LevyModel::gamma_like(1, 1);
  QuadratureConfig cfg = model_quadrature_config();
  cfg.abs_tol = 1e-14;
  for (std::uint64_t n : {2, 9, 30}) {
    const DecrementRow row = decrement_row(m, n);
    const double nd = static_cast<double>(n);
    const double norm = laplace_exponent_int(m, n);
    for (std::uint64_t k = 1; k <= n; ++k) {
      const double kd = static_cast<double>(k);
      const auto r = [kd, nd](double x, double w) {
        return std::pow(w, kd - 1.0) * std::exp(-(nd - kd) * x);
      };
      const double q = std::exp(log_binomial(nd, kd)) * levy_integral(m, r, cfg) / norm;
      if (std::abs(q - row.q[k - 1]) > 1e-8) return fmt("n = %g, m = %g: %.3g", nd, kd, q);
    }
  }
  return {};
}

std::string composition_shape(std::uint64_t seed) {
  RandomStream rng(seed, derive_stream_id("validate-composition", 0));
  for (const LevyModel& m : {LevyModel::gamma(1, 1), LevyModel::gamma_like(2, 0.5),
                             LevyModel::compound_poisson(JumpDistribution::deterministic(0.3))}) {
    const DecrementSampler sampler(m);
    for (std::uint64_t n : {1, 2, 13, 200}) {
      for (int rep = 0; rep < 20; ++rep) {
        const Composition c = sampler.sample(n, rng);
        std::uint64_t sum = 0;
        for (auto b : c.blocks) {
          if (b == 0) return "zero block";
          sum += b;
        }
        if (sum != n || c.block_count() < 1 || c.block_count() > n) return "blocks do not sum to n";
      }
    }
  }
  return {};
}

std::string pathwise_monotone(std::uint64_t seed) {
  PathwiseTrajectory traj(LevyModel::gamma_like(1, 1), 1e-6,
                          RandomStream(seed, derive_stream_id("validate-pathwise", 0)));
  std::uint64_t prev = 0;
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t k = traj.extend();
    if (k < prev || k - prev > 1) return fmt("step %g: K jumped from %g", i, static_cast<double>(prev));
    if (i == 0 && k != 1) return "K_1 != 1";
    prev = k;
  }
  return {};
}

std::string truncation_bound() {
  const LevyModel m = LevyModel::gamma(1, 1);
  for (double eps : {1e-8, 1e-6, 1e-3}) {
    const double b = truncation_bias_bound(m, 1000, eps);
    if (!(b >= 0.0) || b > 1000 * eps) return fmt("eps = %g: bound %.3g", eps, b);
  }
  return truncation_bias_bound(m, 1000, 0.0) == 0.0 ? std::string{} : "nonzero at eps = 0";
}

std::string cp_approx_edges(std::uint64_t seed) {
  RandomStream rng(seed, derive_stream_id("validate-cp", 0));
  const JumpDistribution j = JumpDistribution::exponential(1);
  if (cp_block_count_approx(j, -1.0, rng) != 0 || cp_block_count_approx(j, 0.0, rng) != 0)
    return "nonzero count for t <= 0";
  const CpApproxTrajectory traj(j, 50.0, rng);
  std::uint64_t prev = 0;
  for (double t = 0.0; t <= 50.0; t += 0.5) {
    const auto c = traj.count_at(t);
    if (c < prev) return "count decreased along t";
    prev = c;
  }
  return {};
}

std::string a1_monotone(std::uint64_t seed) {
  RandomStream rng(seed, derive_stream_id("validate-a1", 0));
  const LevyModel m = LevyModel::gamma(1, 1);
  const InversePath path = simulate_inverse_path(m, 1e-3, 6.0, rng);
  path.validate();
  double prev = -1.0;
  for (double t = 0.0; t <= 6.0; t += 0.25) {
    const double a = conditional_mean_A1(m, t, path);
    if (a < prev) return fmt("A1 decreased at t = %g", t);
    prev = a;
  }
  return {};
}

std::string brownian_scaling(std::uint64_t seed) {
  RandomStream rng(seed, derive_stream_id("validate-bm", 0));
  BrownianPath p = simulate_bm(2.0, 1e-3, rng);
  BrownianPath q = p;
  for (double& v : q.values) v *= 2.0;
  const KernelSpec k = KernelSpec::power(0.5);
  if (convolve_bm(q, k, 2.0) != 2.0 * convolve_bm(p, k, 2.0)) return "convolution not linear";
  if (weighted_ito_integral(q, 0.5, 2.0) != 2.0 * weighted_ito_integral(p, 0.5, 2.0))
    return "weighted integral not linear";
  if (p.values.front() != 0.0) return "B(0) != 0";
  return {};
}

std::string running_extremes() {
  RunningExtremes ext;
  double prev_max = -INFINITY, prev_min = INFINITY;
  for (double v : {0.1, -0.3, 0.5, 0.2, -0.9, 1.2, 0.0}) {
    ext.append(v);
    if (ext.running_max() < prev_max || ext.running_min() > prev_min) return "not monotone";
    if (ext.running_min() > ext.running_max()) return "min above max";
    prev_max = ext.running_max();
    prev_min = ext.running_min();
  }
  return {};
}

std::string ks_quantiles() {
  const std::size_t n = 1000;
  const double var = 1.0 / 3.0;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    // bisection for the (i + 0.5) / n quantile
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid, var) < p ? lo : hi) = mid;
    }
    xs[i] = 0.5 * (lo + hi);
  }
  const KsResult r = ks_statistic(xs, var);
  return r.distance <= 1.0 / static_cast<double>(n) ? std::string{}
                                                     : fmt("D = %.3g", r.distance);
}

std::string persistence_round_trip(std::uint64_t seed) {
  ExperimentManifest m =
      ExperimentManifest::for_model(ExperimentKind::clt, LevyModel::gamma_like(1, 1));
  m.n_grid = {10, 100};
  m.replicates = 25;
  m.master_seed = seed;
  const ExperimentResult one = run_clt_experiment(m, {1});
  const ExperimentResult four = run_clt_experiment(m, {4});
  if (records_to_csv(one.records) != records_to_csv(four.records))
    return "CSV depends on the worker count";
  for (const ResultRecord& r : one.records)
    if (r.normalized != (r.raw - r.centering) / r.normalization) return "normalized != (raw - c) / s";
  const auto dir = std::filesystem::temp_directory_path() /
                   ("regen_validate_" + std::to_string(seed) + "_" +
                    std::to_string(std::hash<std::string>{}(records_to_csv(one.records)) % 100000));
  persist(one, dir);
  const LoadedExperiment back = load(dir);
  std::filesystem::remove_all(dir);
  if (!(back.manifest == m)) return "manifest changed in round trip";
  if (back.records != one.records) return "records changed in round trip";
  return {};
}

}  // namespace

std::vector<CheckResult> run_validation_suite(std::uint64_t seed) {
  const std::vector<std::pair<std::string, Check>> checks = {
      {"polygamma_recurrence", polygamma_recurrence},
      {"polygamma_matches_integral_representation", polygamma_integral},
      {"frullani_integrals", frullani},
      {"log_beta_symmetry", log_beta_symmetry},
      {"phi_nondecreasing_concave", phi_shape},
      {"phi_gamma_expansion_convergence", phi_gamma_convergence},
      {"moments_quadrature_vs_closed_form", moment_formulas},
      {"laplace_exponent_binomial_identity", laplace_binomial_identity},
      {"decrement_rows_are_probability_vectors", decrement_mass},
      {"gammalike_rows_match_quadrature", gammalike_rows_vs_quadrature},
      {"compositions_sum_to_n", [seed] { return composition_shape(seed); }},
      {"pathwise_coupled_monotonicity", [seed] { return pathwise_monotone(seed); }},
      {"truncation_bias_majorization", truncation_bound},
      {"cp_approximation_edges", [seed] { return cp_approx_edges(seed); }},
      {"a1_monotone_in_t", [seed] { return a1_monotone(seed); }},
      {"brownian_integrals_linear", [seed] { return brownian_scaling(seed); }},
      {"running_extremes_monotone", running_extremes},
      {"ks_quantile_sample", ks_quantiles},
      {"determinism_and_persistence", [seed] { return persistence_round_trip(seed); }},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, check] : checks) {
    CheckResult r{name, false, {}};
    try {
      r.detail = check();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

bool report_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  bool all = true;
  for (const CheckResult& c : checks) {
    if (c.passed) {
      out << "PASS " << c.name << '\n';
    } else {
      out << "FAIL " << c.name << ": " << c.detail << '\n';
      all = false;
    }
  }
  return all;
}

}  // namespace regen
