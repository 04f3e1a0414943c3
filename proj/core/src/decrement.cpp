#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "regen/composition.hpp"
#include "regen/special_math.hpp"

namespace regen {

namespace {

constexpr double kCutoff = 1.0 - 1e-14;

double log_sum_exp(const std::vector<double>& xs) {
  const double top = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - top);
  return top + std::log(acc);
}

// E[h(Y)], Y ~ Beta(m, c), h(y) = y / -log(1 - y).
double beta_mean_of_h(double m, double c) {
  // In x = -log(1 - y) the Beta(m, c) density is (1 - e^{-x})^{m-1} e^{-c x} / B(m, c)
  // and h(y) = y / x, so the (1 - y)^{c-1} singularity at y = 1 disappears.
  const double lb = log_beta(m, c);
  const Integrand integrand = [m, c, lb](double x) {
    if (!(x > 0.0)) return m == 1.0 ? std::exp(-lb) : 0.0;
    const double y = -std::expm1(-x);
    return std::exp((m - 1.0) * std::log(y) - c * x - lb) * y / x;
  };
  const double s = m + c;
  const double mean = m / s;
  const double sd = std::sqrt(m * c / (s * s * (s + 1.0)));
  std::vector<double> cuts{0.0};
  for (double k : {-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0}) {
    const double y = mean + k * sd;
    if (!(y > 0.0 && y < 1.0)) continue;
    const double x = -std::log1p(-y);
    if (x > cuts.back()) cuts.push_back(x);
  }
  // Past the last cut the integrand decays at least like e^{-c x}.
  cuts.push_back(cuts.back() + 40.0 / c);
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-13;
  cfg.max_subdivisions = 4000;
  return integrate_adaptive(integrand, cuts, cfg);
}

}  // namespace

double DecrementRow::mass() const {
  // Small terms first.
  std::vector<double> sorted(q);
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.end(), 0.0);
}

GammaIngredient gamma_decrement_ingredient(std::uint64_t m, double c, double max_cancellation) {
  if (m == 0) throw std::domain_error("gamma_decrement_ingredient: m must be >= 1");
  if (!(c > 0.0)) throw std::domain_error("gamma_decrement_ingredient: c must be > 0");
  const double md = static_cast<double>(m);
  // The terms grow like C(m, m/2); beyond ~50 the alternating form is hopeless.
  if (m <= 50) {
    double sum = 0.0;
    double abs_sum = 0.0;
    for (std::uint64_t j = 1; j <= m; ++j) {
      const double jd = static_cast<double>(j);
      const double term = std::exp(log_binomial(md, jd)) * std::log1p(jd / c);
      sum += (j % 2 == 1) ? term : -term;
      abs_sum += term;
    }
    const double cancellation = sum > 0.0 ? abs_sum / sum : INFINITY;
    if (cancellation <= max_cancellation) return {std::log(sum), false, cancellation};
    return {log_beta(md, c) + std::log(beta_mean_of_h(md, c)), true, cancellation};
  }
  return {log_beta(md, c) + std::log(beta_mean_of_h(md, c)), true, INFINITY};
}

struct DecrementSampler::Cache {
  std::mutex mutex;
  std::unordered_map<std::uint64_t, std::shared_ptr<const std::vector<double>>> cdfs;
};

DecrementSampler::DecrementSampler(LevyModel model, std::uint64_t cache_limit)
    : model_(std::move(model)), cache_limit_(cache_limit), cache_(std::make_shared<Cache>()) {}

double DecrementSampler::log_entry(std::uint64_t n, std::uint64_t m, bool* fallback) const {
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double log_norm = std::log(laplace_exponent_int(model_, n));
  const double log_choose = log_binomial(nd, md);
  switch (model_.kind()) {
    case ModelKind::gamma_like:
      return log_choose + std::log(model_.theta()) + log_beta(md, nd - md + model_.lambda()) -
             log_norm;
    case ModelKind::gamma: {
      const GammaIngredient g = gamma_decrement_ingredient(m, nd - md + model_.lambda());
      if (fallback && g.fallback) *fallback = true;
      return log_choose + std::log(model_.theta()) + g.log_value - log_norm;
    }
    case ModelKind::compound_poisson: {
      const JumpDistribution& j = model_.jump();
      switch (j.kind()) {
        case JumpDistribution::Kind::exponential:
          return log_choose + std::log(j.rate()) + log_beta(md + 1.0, nd - md + j.rate()) -
                 log_norm;
        case JumpDistribution::Kind::deterministic: {
          const double a = j.value();
          return log_choose + md * std::log(-std::expm1(-a)) - (nd - md) * a - log_norm;
        }
        case JumpDistribution::Kind::table: {
          std::vector<double> parts;
          parts.reserve(j.atoms().size());
          for (std::size_t i = 0; i < j.atoms().size(); ++i) {
            if (j.weights()[i] == 0.0) continue;
            const double a = j.atoms()[i];
            parts.push_back(std::log(j.weights()[i]) + md * std::log(-std::expm1(-a)) -
                            (nd - md) * a);
          }
          return log_choose + log_sum_exp(parts) - log_norm;
        }
      }
    }
  }
  return -INFINITY;
}

DecrementRow DecrementSampler::row(std::uint64_t n) const {
  if (n == 0) throw std::domain_error("decrement_row: n must be >= 1");
  DecrementRow out;
  out.n = n;
  out.q.resize(n);
  const double nd = static_cast<double>(n);
  const bool exp_cp = model_.is_compound_poisson() &&
                      model_.jump().kind() == JumpDistribution::Kind::exponential;
  if (model_.kind() == ModelKind::gamma_like || exp_cp) {
    // Ratio recurrences of the Beta closed forms.
    const double shift = exp_cp ? model_.jump().rate() : model_.lambda();
    double q = exp_cp ? shift / (nd - 1.0 + shift)
                      : nd * model_.theta() / ((nd - 1.0 + shift) * laplace_exponent_int(model_, n));
    for (std::uint64_t m = 1; m <= n; ++m) {
      out.q[m - 1] = q;
      if (m == n) break;
      const double md = static_cast<double>(m);
      const double rest = nd - md;
      q *= exp_cp ? rest / (rest - 1.0 + shift) : rest * md / ((md + 1.0) * (rest - 1.0 + shift));
    }
    return out;
  }
  for (std::uint64_t m = 1; m <= n; ++m)
    out.q[m - 1] = std::exp(log_entry(n, m, &out.used_quadrature_fallback));
  return out;
}

std::shared_ptr<const std::vector<double>> DecrementSampler::cached_cdf(std::uint64_t n) const {
  {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->cdfs.find(n);
    if (it != cache_->cdfs.end()) return it->second;
  }
  const DecrementRow r = row(n);
  auto cdf = std::make_shared<std::vector<double>>(n);
  std::partial_sum(r.q.begin(), r.q.end(), cdf->begin());
  std::lock_guard lock(cache_->mutex);
  auto [it, inserted] = cache_->cdfs.emplace(n, std::move(cdf));
  return it->second;
}

std::uint64_t DecrementSampler::draw_lazy(std::uint64_t n, double u) const {
  const double nd = static_cast<double>(n);
  const bool exp_cp = model_.is_compound_poisson() &&
                      model_.jump().kind() == JumpDistribution::Kind::exponential;
  double cum = 0.0;
  if (model_.kind() == ModelKind::gamma_like || exp_cp) {
    const double shift = exp_cp ? model_.jump().rate() : model_.lambda();
    double q = exp_cp ? shift / (nd - 1.0 + shift)
                      : nd * model_.theta() / ((nd - 1.0 + shift) * laplace_exponent_int(model_, n));
    for (std::uint64_t m = 1; m < n; ++m) {
      cum += q;
      if (u < cum || cum > kCutoff) return m;
      const double md = static_cast<double>(m);
      const double rest = nd - md;
      q *= exp_cp ? rest / (rest - 1.0 + shift) : rest * md / ((md + 1.0) * (rest - 1.0 + shift));
    }
    return n;
  }
  if (u < 0.5) {
    for (std::uint64_t m = 1; m < n; ++m) {
      cum += std::exp(log_entry(n, m, nullptr));
      if (u < cum || cum > kCutoff) return m;
    }
    return n;
  }
  // The row has unit mass, so the upper half of the law can be inverted from
  // the top: the answer is the largest m with sum_{k >= m} q(n, k) >= 1 - u.
  const double survival = 1.0 - u;
  for (std::uint64_t m = n; m > 1; --m) {
    cum += std::exp(log_entry(n, m, nullptr));
    if (cum >= survival) return m;
  }
  return 1;
}

std::uint64_t DecrementSampler::draw_first_block(std::uint64_t n, RandomStream& rng) const {
  if (n == 0) throw std::domain_error("draw_first_block: n must be >= 1");
  if (n == 1) return 1;
  const double u = rng.uniform();
  if (model_.kind() == ModelKind::gamma && n <= cache_limit_) {
    const auto cdf = cached_cdf(n);
    const auto it = std::upper_bound(cdf->begin(), cdf->end(), u);
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(it - cdf->begin()) + 1, n);
  }
  return draw_lazy(n, u);
}

Composition DecrementSampler::sample(std::uint64_t n, RandomStream& rng) const {
  if (n == 0) throw std::domain_error("sample_composition: n must be >= 1");
  Composition c;
  c.n = n;
  std::uint64_t rest = n;
  while (rest > 0) {
    const std::uint64_t m = draw_first_block(rest, rng);
    c.blocks.push_back(m);
    rest -= m;
  }
  return c;
}

std::uint64_t DecrementSampler::sample_block_count(std::uint64_t n, RandomStream& rng) const {
  if (n == 0) throw std::domain_error("sample_block_count: n must be >= 1");
  std::uint64_t k = 0;
  for (std::uint64_t rest = n; rest > 0; ++k) rest -= draw_first_block(rest, rng);
  return k;
}

DecrementRow decrement_row(const LevyModel& model, std::uint64_t n) {
  return DecrementSampler(model, 0).row(n);
}

Composition sample_composition(const LevyModel& model, std::uint64_t n, RandomStream& rng) {
  return DecrementSampler(model).sample(n, rng);
}

PoissonizedSample sample_Kn_poissonized(const DecrementSampler& sampler, double t,
                                        RandomStream& rng) {
  if (!(t >= 0.0)) throw std::domain_error("sample_Kn_poissonized: t must be >= 0");
  PoissonizedSample out;
  for (double s = rng.exponential(); s <= t; s += rng.exponential()) ++out.count;
  if (out.count > 0) out.blocks = sampler.sample_block_count(out.count, rng);
  return out;
}

PoissonizedSample sample_Kn_poissonized(const LevyModel& model, double t, RandomStream& rng) {
  return sample_Kn_poissonized(DecrementSampler(model), t, rng);
}

}  // namespace regen
