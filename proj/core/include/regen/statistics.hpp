#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace regen {

double normal_cdf(double x, double variance = 1.0);

double sample_mean(std::span<const double> xs);
/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> xs);

struct KsResult {
  double distance;
  double critical;  // asymptotic 1% critical value
  bool pass_1pct;
};

/// One-sample Kolmogorov-Smirnov distance to Normal(0, variance) with
/// critical value 1.628 / sqrt(N). Throws std::invalid_argument for N < 20
/// or a sample with zero spread.
KsResult ks_statistic(std::span<const double> sample, double variance);

/// Two-sample distance with critical value 1.628 sqrt((n + m) / (n m)).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Total variation distance between the empirical laws of two integer samples.
double total_variation(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Running max / min of a normalized trajectory plus a coverage histogram:
/// `grid_points` equally spaced targets on [-1, 1], each marked visited once
/// a value lands within `tolerance` of it.
class RunningExtremes {
 public:
  explicit RunningExtremes(std::size_t grid_points = 41, double tolerance = 0.05);

  void append(double value);

  double running_max() const noexcept { return max_; }
  double running_min() const noexcept { return min_; }
  std::uint64_t count() const noexcept { return count_; }
  double tolerance() const noexcept { return tolerance_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<std::uint64_t>& hits() const noexcept { return hits_; }
  /// Fraction of grid targets visited at least once.
  double coverage() const;

 private:
  double tolerance_;
  double max_;
  double min_;
  std::uint64_t count_ = 0;
  std::vector<double> grid_;
  std::vector<std::uint64_t> hits_;
};

}  // namespace regen
