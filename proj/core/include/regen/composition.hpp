#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "regen/levy_model.hpp"
#include "regen/random.hpp"

namespace regen {

/// Ordered positive block sizes of n.
struct Composition {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> blocks;

  std::uint64_t block_count() const noexcept { return blocks.size(); }
  bool operator==(const Composition&) const = default;
};

/// Law of the first block size of a composition of n:
///   q(m) = C(n, m) I(n, m) / Phi_L(n),
///   I(n, m) = int (1 - e^{-x})^m e^{-(n - m) x} nu(dx),  m = 1..n.
/// q[m - 1] holds q(m).
struct DecrementRow {
  std::uint64_t n = 0;
  std::vector<double> q;
  /// True when some gamma entry left the alternating closed form for quadrature.
  bool used_quadrature_fallback = false;

  double mass() const;
};

/// log of int_0^inf (1 - e^{-x})^m e^{-c x} / x dx, the gamma-measure
/// ingredient of a decrement entry. Uses the alternating Frullani sum
///   sum_{j=1}^m (-1)^{j+1} C(m, j) log((c + j) / c)
/// while sum|terms| / |sum| stays below `max_cancellation`, otherwise
///   B(m, c) E[Y / -log(1 - Y)],  Y ~ Beta(m, c),
/// by adaptive quadrature.
struct GammaIngredient {
  double log_value;
  bool fallback;
  double cancellation;  // sum|terms| / |sum| of the alternating form
};
GammaIngredient gamma_decrement_ingredient(std::uint64_t m, double c,
                                           double max_cancellation = 1024.0);

/// Exact sampler of regenerative compositions by the first-block recursion.
///
/// Rows for the gamma family (no cheap closed form) are cached up to
/// `cache_limit`; other families evaluate entries lazily in increasing m
/// with early cutoff once the cumulative mass exceeds 1 - 1e-14.
/// Safe for concurrent use from several threads.
class DecrementSampler {
 public:
  explicit DecrementSampler(LevyModel model, std::uint64_t cache_limit = 4096);

  const LevyModel& model() const noexcept { return model_; }

  DecrementRow row(std::uint64_t n) const;
  std::uint64_t draw_first_block(std::uint64_t n, RandomStream& rng) const;
  Composition sample(std::uint64_t n, RandomStream& rng) const;
  /// Block count only, without materializing the blocks.
  std::uint64_t sample_block_count(std::uint64_t n, RandomStream& rng) const;

 private:
  struct Cache;

  double log_entry(std::uint64_t n, std::uint64_t m, bool* fallback) const;
  std::uint64_t draw_lazy(std::uint64_t n, double u) const;
  std::shared_ptr<const std::vector<double>> cached_cdf(std::uint64_t n) const;

  LevyModel model_;
  std::uint64_t cache_limit_;
  std::shared_ptr<Cache> cache_;
};

DecrementRow decrement_row(const LevyModel& model, std::uint64_t n);
Composition sample_composition(const LevyModel& model, std::uint64_t n, RandomStream& rng);

struct PoissonizedSample {
  std::uint64_t count = 0;   // N ~ Poisson(t)
  std::uint64_t blocks = 0;  // K_N, zero when N = 0
};

/// N is the number of unit-rate exponential partial sums not exceeding t.
PoissonizedSample sample_Kn_poissonized(const DecrementSampler& sampler, double t,
                                        RandomStream& rng);
PoissonizedSample sample_Kn_poissonized(const LevyModel& model, double t, RandomStream& rng);

/// Jumps of size >= eps: total rate nu([eps, inf)) and a sampler for the
/// normalized restriction. Throws std::invalid_argument when eps <= 0 for an
/// infinite measure or when nu([eps, inf)) = 0.
class TruncatedJumpLaw {
 public:
  TruncatedJumpLaw(const LevyModel& model, double eps);

  double rate() const noexcept { return mass_small_ + mass_large_; }
  double epsilon() const noexcept { return eps_; }
  double sample(RandomStream& rng) const;

 private:
  double sample_small(RandomStream& rng) const;
  double sample_large(RandomStream& rng) const;
  double h(double y) const;

  ModelKind kind_;
  double theta_ = 1.0;
  double lambda_ = 1.0;
  std::optional<JumpDistribution> jump_;
  double eps_;
  // y = 1 - e^{-x} coordinates; "small" is [y_eps, y_mid], "large" [y_mid, 1).
  double y_eps_ = 0.0;
  double y_mid_ = 0.5;
  double mass_small_ = 0.0;
  double mass_large_ = 0.0;
  double small_bound_ = 1.0;
  double large_bound_ = 1.0;
};

/// One realization of the eps-truncated subordinator range together with a
/// growing exponential sample; K is the number of gaps between consecutive
/// range levels that hold at least one sample point. Single owner.
class PathwiseTrajectory {
 public:
  PathwiseTrajectory(const LevyModel& model, double eps, RandomStream rng);

  /// Adds E_{n+1} to the same realization and returns the updated K.
  std::uint64_t extend();
  std::uint64_t extend_to(std::uint64_t n);

  std::uint64_t sample_size() const noexcept { return n_; }
  std::uint64_t block_count() const noexcept { return k_; }
  const std::vector<double>& levels() const noexcept { return levels_; }
  std::uint64_t stream_id() const noexcept { return rng_.stream_id(); }

 private:
  void grow_levels(double above);

  TruncatedJumpLaw law_;
  RandomStream rng_;
  std::vector<double> levels_{0.0};
  std::vector<char> occupied_{0};
  std::uint64_t n_ = 0;
  std::uint64_t k_ = 0;
};

/// Block count of n exponential points against the eps-truncated range.
/// Sorts the points once and merges them against the levels.
std::uint64_t sample_Kn_pathwise(const LevyModel& model, std::uint64_t n, double eps,
                                 RandomStream& rng);

/// int_{(0, eps)} (1 - exp(-n (1 - e^{-x}))) nu(dx).
double truncation_bias_bound(const LevyModel& model, std::uint64_t n, double eps);

/// Largest eps (to within 1%) with truncation_bias_bound(n, eps) <= target.
double select_truncation(const LevyModel& model, std::uint64_t n, double target = 0.5);

/// sum_k 1{xi_1 + ... + xi_{k-1} + |log(1 - e^{-xi_k})| <= t}.
std::uint64_t cp_block_count_approx(const JumpDistribution& jump, double t, RandomStream& rng);

/// The same sum evaluated along increasing t for one xi-sequence.
class CpApproxTrajectory {
 public:
  CpApproxTrajectory(const JumpDistribution& jump, double t_max, RandomStream& rng);
  std::uint64_t count_at(double t) const;
  double horizon() const noexcept { return t_max_; }

 private:
  double t_max_;
  std::vector<double> thresholds_;  // sorted xi_1 + ... + xi_{k-1} + |log(1 - e^{-xi_k})|
};

/// Right-continuous step path y -> S^{<-}(y): value[i] on [grid[i], grid[i+1]).
/// S^{<-}(0-) = 0, so value[0] is an atom at grid[0].
struct InversePath {
  std::vector<double> grid;
  std::vector<double> values;
  double epsilon = 0.0;
  double horizon = 0.0;  // path known on [0, horizon]

  double value_at(double y) const;
  /// Checks the invariants; throws std::invalid_argument.
  void validate() const;
};

/// S^{<-} of the eps-truncated subordinator on [0, horizon].
InversePath simulate_inverse_path(const LevyModel& model, double eps, double horizon,
                                  RandomStream& rng);

/// A_1(t) = int_{[0, t]} phi(t - x) dS^{<-}(x), summed over the path's jumps.
double conditional_mean_A1(const LevyModel& model, double t, const InversePath& path);
double conditional_mean_A1(const std::function<double(double)>& phi_of_log, double t,
                           const InversePath& path);

}  // namespace regen
