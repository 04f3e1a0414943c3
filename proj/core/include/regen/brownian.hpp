#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "regen/random.hpp"
#include "regen/statistics.hpp"

namespace regen {

/// Brownian motion sampled at k * step, k = 0..N.
struct BrownianPath {
  double step = 0.0;
  std::vector<double> values;

  double horizon() const noexcept {
    return values.empty() ? 0.0 : step * static_cast<double>(values.size() - 1);
  }
  /// Every `factor`-th value; the same realization on a coarser grid.
  BrownianPath coarsen(std::size_t factor) const;
  /// Grid index of t; throws when t is off the grid or beyond the horizon.
  std::size_t index_of(double t) const;
};

/// Kernel f with f' regularly varying of index alpha - 1:
///   power:      f(x) = x^alpha
///   power_log:  f(x) = x^alpha (1 + log(1 + x))
struct KernelSpec {
  enum class Shape { power, power_log };

  double alpha = 1.0;
  Shape shape = Shape::power;
  double t0 = 0.0;  // f(t) > 0 for t > t0

  static KernelSpec power(double alpha);
  static KernelSpec power_log(double alpha);

  double f(double x) const;
  double derivative(double x) const;
  std::string name() const;
  static KernelSpec parse(const std::string& name, double alpha);
};

inline constexpr std::size_t kDefaultMaxBrownianPoints = std::size_t{1} << 25;

/// Partial sums of iid Normal(0, step) increments. Throws
/// std::length_error when T / step exceeds `max_points`.
BrownianPath simulate_bm(double T, double step, RandomStream& rng,
                         std::size_t max_points = kDefaultMaxBrownianPoints);

/// int_0^t B(t - x) f'(x) dx on the path grid. On each cell B is replaced
/// by its trapezoid average and f' integrated exactly, so singular f' at 0
/// (alpha < 1) costs no accuracy.
double convolve_bm(const BrownianPath& path, const KernelSpec& kernel, double t);

/// sum_k (t - x_k)^alpha (B(x_{k+1}) - B(x_k)) over grid points x_k < t.
double weighted_ito_integral(const BrownianPath& path, double alpha, double t);

/// (2 (2 alpha + 1)^{-1} t log log t)^{1/2} f(t); needs t > max(e, t0).
double bm_lil_normalization(const KernelSpec& kernel, double t);

/// Running extremes and coverage of value / bm_lil_normalization(t).
RunningExtremes lil_trajectory_stat(const std::vector<std::pair<double, double>>& samples,
                                    const KernelSpec& kernel);

}  // namespace regen
