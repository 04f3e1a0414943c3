#include "regen/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace regen {

namespace {

// sqrt(-log(0.01 / 2) / 2)
constexpr double kKsCritical1pct = 1.628;

}  // namespace

double normal_cdf(double x, double variance) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("sample_mean: empty sample");
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need at least two values");
  const double m = sample_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

KsResult ks_statistic(std::span<const double> sample, double variance) {
  if (sample.size() < 20) throw std::invalid_argument("ks_statistic: need at least 20 values");
  if (!(variance > 0.0)) throw std::invalid_argument("ks_statistic: variance must be > 0");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  if (xs.front() == xs.back()) throw std::invalid_argument("ks_statistic: degenerate sample");
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i], variance);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double critical = kKsCritical1pct / std::sqrt(n);
  return {d, critical, d <= critical};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double critical = kKsCritical1pct * std::sqrt((nx + ny) / (nx * ny));
  return {d, critical, d <= critical};
}

double total_variation(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("total_variation: empty sample");
  std::map<std::uint64_t, double> diff;
  for (auto v : a) diff[v] += 1.0 / static_cast<double>(a.size());
  for (auto v : b) diff[v] -= 1.0 / static_cast<double>(b.size());
  double acc = 0.0;
  for (const auto& [v, d] : diff) acc += std::abs(d);
  return 0.5 * acc;
}

RunningExtremes::RunningExtremes(std::size_t grid_points, double tolerance)
    : tolerance_(tolerance), max_(-INFINITY), min_(INFINITY), grid_(grid_points),
      hits_(grid_points, 0) {
  if (grid_points < 2) throw std::invalid_argument("RunningExtremes: need at least two grid points");
  for (std::size_t i = 0; i < grid_points; ++i)
    grid_[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_points - 1);
}

void RunningExtremes::append(double value) {
  if (!std::isfinite(value)) throw std::domain_error("RunningExtremes: non-finite value");
  max_ = std::max(max_, value);
  min_ = std::min(min_, value);
  ++count_;
  for (std::size_t i = 0; i < grid_.size(); ++i)
    if (std::abs(value - grid_[i]) <= tolerance_) ++hits_[i];
}

double RunningExtremes::coverage() const {
  const auto visited = std::count_if(hits_.begin(), hits_.end(), [](auto h) { return h > 0; });
  return static_cast<double>(visited) / static_cast<double>(grid_.size());
}

}  // namespace regen
