#include "regen/brownian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace regen {

BrownianPath BrownianPath::coarsen(std::size_t factor) const {
  if (factor == 0) throw std::invalid_argument("coarsen: factor must be >= 1");
  BrownianPath out;
  out.step = step * static_cast<double>(factor);
  out.values.reserve(values.size() / factor + 1);
  for (std::size_t i = 0; i < values.size(); i += factor) out.values.push_back(values[i]);
  return out;
}

std::size_t BrownianPath::index_of(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("Brownian path: t must be >= 0");
  const double k = std::round(t / step);
  if (std::abs(k * step - t) > 1e-9 * std::max(1.0, t))
    throw std::domain_error("Brownian path: t = " + std::to_string(t) + " is not a grid point");
  if (k >= static_cast<double>(values.size()))
    throw std::domain_error("Brownian path: t = " + std::to_string(t) + " beyond the horizon " +
                            std::to_string(horizon()));
  return static_cast<std::size_t>(k);
}

KernelSpec KernelSpec::power(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("kernel: alpha must be > 0");
  return {alpha, Shape::power, 0.0};
}

KernelSpec KernelSpec::power_log(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("kernel: alpha must be > 0");
  return {alpha, Shape::power_log, 0.0};
}

double KernelSpec::f(double x) const {
  const double p = std::pow(x, alpha);
  return shape == Shape::power ? p : p * (1.0 + std::log1p(x));
}

double KernelSpec::derivative(double x) const {
  const double d = alpha * std::pow(x, alpha - 1.0);
  if (shape == Shape::power) return d;
  return d * (1.0 + std::log1p(x)) + std::pow(x, alpha) / (1.0 + x);
}

std::string KernelSpec::name() const { return shape == Shape::power ? "power" : "power_log"; }

KernelSpec KernelSpec::parse(const std::string& name, double alpha) {
  if (name == "power") return power(alpha);
  if (name == "power_log") return power_log(alpha);
  throw std::invalid_argument("unknown kernel '" + name + "' (expected power or power_log)");
}

BrownianPath simulate_bm(double T, double step, RandomStream& rng, std::size_t max_points) {
  if (!(T > 0.0) || !(step > 0.0)) throw std::domain_error("simulate_bm: T and step must be > 0");
  const double cells = std::round(T / step);
  if (cells + 1.0 > static_cast<double>(max_points))
    throw std::length_error("simulate_bm: " + std::to_string(cells + 1.0) +
                            " grid points exceed the cap of " + std::to_string(max_points));
  const auto n = static_cast<std::size_t>(cells);
  BrownianPath path;
  path.step = step;
  path.values.resize(n + 1);
  const double sd = std::sqrt(step);
  double b = 0.0;
  path.values[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    b += sd * rng.normal();
    path.values[k] = b;
  }
  return path;
}

double convolve_bm(const BrownianPath& path, const KernelSpec& kernel, double t) {
  const std::size_t n = path.index_of(t);
  const auto& b = path.values;
  double acc = 0.0;
  double f_prev = kernel.f(0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double f_next = kernel.f(static_cast<double>(k + 1) * path.step);
    acc += 0.5 * (b[n - k] + b[n - k - 1]) * (f_next - f_prev);
    f_prev = f_next;
  }
  return acc;
}

double weighted_ito_integral(const BrownianPath& path, double alpha, double t) {
  if (!(alpha >= 0.0)) throw std::domain_error("weighted_ito_integral: alpha must be >= 0");
  const std::size_t n = path.index_of(t);
  const auto& b = path.values;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) * path.step;
    acc += std::pow(t - x, alpha) * (b[k + 1] - b[k]);
  }
  return acc;
}

double bm_lil_normalization(const KernelSpec& kernel, double t) {
  if (!(t > std::exp(1.0)) || !(t > kernel.t0))
    throw std::domain_error("LIL normalization needs t > max(e, t0), got t = " +
                            std::to_string(t));
  return std::sqrt(2.0 / (2.0 * kernel.alpha + 1.0) * t * std::log(std::log(t))) * kernel.f(t);
}

RunningExtremes lil_trajectory_stat(const std::vector<std::pair<double, double>>& samples,
                                    const KernelSpec& kernel) {
  RunningExtremes ext;
  for (const auto& [t, value] : samples) ext.append(value / bm_lil_normalization(kernel, t));
  return ext;
}

}  // namespace regen
