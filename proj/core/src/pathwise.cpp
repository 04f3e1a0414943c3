#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "regen/composition.hpp"
#include "regen/special_math.hpp"

namespace regen {

// In y = 1 - e^{-x} the gamma-family measures read
//   theta (1 - y)^{lambda - 1} h(y) / y dy,
// with h = 1 (gamma-like) or h(y) = y / -log(1 - y) (gamma). Both h and h(y)/y
// are nonincreasing, which the two rejection envelopes below rely on.
TruncatedJumpLaw::TruncatedJumpLaw(const LevyModel& model, double eps)
    : kind_(model.kind()), eps_(eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("truncation eps must be finite and >= 0");
  if (model.is_compound_poisson()) {
    jump_ = model.jump();
    mass_small_ = jump_->tail_mass(eps);
    if (!(mass_small_ > 0.0))
      throw std::invalid_argument("truncation eps leaves no jumps: nu([eps, inf)) = 0");
    return;
  }
  if (!(eps > 0.0))
    throw std::invalid_argument("infinite Levy measure needs a truncation eps > 0");
  theta_ = model.theta();
  lambda_ = model.lambda();
  y_eps_ = -std::expm1(-eps);
  y_mid_ = std::max(0.5, y_eps_);

  QuadratureConfig cfg = model_quadrature_config();
  if (y_eps_ < y_mid_) {
    const double la = lambda_;
    const Integrand in_log_y = [this, la](double s) {
      const double y = std::exp(s);
      return std::pow(-std::expm1(s), la - 1.0) * h(y);
    };
    mass_small_ = theta_ * integrate_adaptive(in_log_y, std::log(y_eps_), std::log(y_mid_), cfg);
    small_bound_ = std::max(std::pow(1.0 - y_eps_, lambda_ - 1.0), std::pow(1.0 - y_mid_, lambda_ - 1.0));
  }
  const double x_mid = -std::log1p(-y_mid_);
  cfg.transform = QuadratureTransform::exp_tail;
  cfg.tail_rate = 0.5 * lambda_;
  mass_large_ = integrate_adaptive([&model](double x) { return nu_density(model, x); }, x_mid,
                                   INFINITY, cfg);
  large_bound_ = h(y_mid_) / y_mid_;
}

double TruncatedJumpLaw::h(double y) const {
  return kind_ == ModelKind::gamma ? y_over_neglog1m(y) : 1.0;
}

double TruncatedJumpLaw::sample_small(RandomStream& rng) const {
  const double lo = std::log(y_eps_);
  const double span = std::log(y_mid_) - lo;
  for (;;) {
    const double y = std::exp(lo + rng.uniform() * span);
    const double accept = std::pow(1.0 - y, lambda_ - 1.0) * h(y) / small_bound_;
    if (rng.uniform() < accept) return -std::log1p(-y);
  }
}

double TruncatedJumpLaw::sample_large(RandomStream& rng) const {
  const double v_mid = 1.0 - y_mid_;
  for (;;) {
    const double v = v_mid * std::pow(rng.uniform_pos(), 1.0 / lambda_);
    if (v <= 0.0) continue;
    const double y = 1.0 - v;
    if (rng.uniform() * large_bound_ < h(y) / y) return -std::log(v);
  }
}

double TruncatedJumpLaw::sample(RandomStream& rng) const {
  if (jump_) return jump_->sample_at_least(eps_, rng);
  if (rng.uniform() * rate() < mass_small_) return sample_small(rng);
  return sample_large(rng);
}

PathwiseTrajectory::PathwiseTrajectory(const LevyModel& model, double eps, RandomStream rng)
    : law_(model, eps), rng_(std::move(rng)) {}

void PathwiseTrajectory::grow_levels(double above) {
  while (levels_.back() <= above) levels_.push_back(levels_.back() + law_.sample(rng_));
  occupied_.resize(levels_.size(), 0);
}

std::uint64_t PathwiseTrajectory::extend() {
  const double e = rng_.exponential();
  grow_levels(e);
  // levels_[g] <= e < levels_[g + 1]
  const auto g = static_cast<std::size_t>(
      std::upper_bound(levels_.begin(), levels_.end(), e) - levels_.begin() - 1);
  if (!occupied_[g]) {
    occupied_[g] = 1;
    ++k_;
  }
  ++n_;
  return k_;
}

std::uint64_t PathwiseTrajectory::extend_to(std::uint64_t n) {
  while (n_ < n) extend();
  return k_;
}

std::uint64_t sample_Kn_pathwise(const LevyModel& model, std::uint64_t n, double eps,
                                 RandomStream& rng) {
  if (n == 0) throw std::domain_error("sample_Kn_pathwise: n must be >= 1");
  const TruncatedJumpLaw law(model, eps);
  std::vector<double> points(n);
  for (double& e : points) e = rng.exponential();
  std::sort(points.begin(), points.end());

  double level = 0.0;
  double next = law.sample(rng);
  std::uint64_t k = 0;
  bool current_occupied = false;
  for (double e : points) {
    while (next <= e) {
      level = next;
      next = level + law.sample(rng);
      current_occupied = false;
    }
    if (!current_occupied) {
      current_occupied = true;
      ++k;
    }
  }
  return k;
}

double truncation_bias_bound(const LevyModel& model, std::uint64_t n, double eps) {
  if (!(eps >= 0.0)) throw std::domain_error("truncation_bias_bound: eps must be >= 0");
  if (eps == 0.0 || n == 0) return 0.0;
  const double nd = static_cast<double>(n);
  const auto r = [nd](double, double w) { return nd * one_minus_exp_over(nd * w); };
  const std::array<double, 1> hints{1.0 / nd};
  return levy_integral(model, r, model_quadrature_config(), eps, hints);
}

double select_truncation(const LevyModel& model, std::uint64_t n, double target) {
  if (!(target > 0.0)) throw std::domain_error("select_truncation: target must be > 0");
  if (model.is_compound_poisson()) return 0.0;
  double lo = std::log(1e-300);
  double hi = 0.0;
  if (truncation_bias_bound(model, n, 1.0) <= target) return 1.0;
  if (truncation_bias_bound(model, n, std::exp(lo)) > target)
    throw std::domain_error("select_truncation: target unreachable");
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    if (truncation_bias_bound(model, n, std::exp(mid)) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(lo);
}

std::uint64_t cp_block_count_approx(const JumpDistribution& jump, double t, RandomStream& rng) {
  if (!(t > 0.0)) return 0;
  std::uint64_t count = 0;
  for (double s = 0.0; s <= t;) {
    const double xi = jump.sample(rng);
    if (s - std::log(-std::expm1(-xi)) <= t) ++count;
    s += xi;
  }
  return count;
}

CpApproxTrajectory::CpApproxTrajectory(const JumpDistribution& jump, double t_max,
                                       RandomStream& rng)
    : t_max_(t_max) {
  if (!(t_max >= 0.0)) throw std::domain_error("CpApproxTrajectory: t_max must be >= 0");
  for (double s = 0.0; s <= t_max;) {
    const double xi = jump.sample(rng);
    const double v = s - std::log(-std::expm1(-xi));
    if (v <= t_max) thresholds_.push_back(v);
    s += xi;
  }
  std::sort(thresholds_.begin(), thresholds_.end());
}

std::uint64_t CpApproxTrajectory::count_at(double t) const {
  if (t > t_max_) throw std::domain_error("CpApproxTrajectory: t beyond the simulated horizon");
  return static_cast<std::uint64_t>(std::upper_bound(thresholds_.begin(), thresholds_.end(), t) -
                                    thresholds_.begin());
}

double InversePath::value_at(double y) const {
  if (grid.empty() || y < grid.front()) return 0.0;
  const auto i = std::upper_bound(grid.begin(), grid.end(), y) - grid.begin() - 1;
  return values[static_cast<std::size_t>(i)];
}

void InversePath::validate() const {
  if (grid.empty() || grid.size() != values.size())
    throw std::invalid_argument("InversePath: grid and values must be non-empty and equally long");
  if (values.front() < 0.0) throw std::invalid_argument("InversePath: values[0] must be >= 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("InversePath: grid must increase");
    if (values[i] < values[i - 1])
      throw std::invalid_argument("InversePath: values must be nondecreasing");
  }
  if (horizon < grid.back()) throw std::invalid_argument("InversePath: horizon below last level");
}

InversePath simulate_inverse_path(const LevyModel& model, double eps, double horizon,
                                  RandomStream& rng) {
  if (!(horizon >= 0.0)) throw std::domain_error("simulate_inverse_path: horizon must be >= 0");
  const TruncatedJumpLaw law(model, eps);
  InversePath path;
  path.epsilon = eps;
  path.horizon = horizon;
  double time = 0.0;
  double level = 0.0;
  for (;;) {
    // S stays at `level` until the next jump time, which is S^{<-} on this step.
    time += rng.exponential() / law.rate();
    path.grid.push_back(level);
    path.values.push_back(time);
    level += law.sample(rng);
    if (level > horizon) break;
  }
  return path;
}

double conditional_mean_A1(const std::function<double(double)>& phi_of_log, double t,
                           const InversePath& path) {
  if (!(t >= 0.0)) throw std::domain_error("conditional_mean_A1: t must be >= 0");
  if (t > path.horizon) throw std::domain_error("conditional_mean_A1: path does not cover [0, t]");
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < path.grid.size() && path.grid[i] <= t; ++i) {
    const double jump = path.values[i] - prev;
    prev = path.values[i];
    if (jump != 0.0) acc += phi_of_log(t - path.grid[i]) * jump;
  }
  return acc;
}

double conditional_mean_A1(const LevyModel& model, double t, const InversePath& path) {
  return conditional_mean_A1([&model](double u) { return phi(model, std::exp(u)); }, t, path);
}

}  // namespace regen
