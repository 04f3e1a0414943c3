#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace regen {

enum class QuadratureTransform {
  none,
  /// x = a - log(1 - u) / tail_rate, u in [0, 1). Maps [a, inf) onto a
  /// finite interval; integrands decaying like exp(-tail_rate x) become
  /// polynomial-like near u = 1.
  exp_tail,
};

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  QuadratureTransform transform = QuadratureTransform::none;
  double tail_rate = 1.0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Raised when the error target is not met within max_subdivisions.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7, 15) quadrature.
///
/// `b` may be +infinity, in which case the exp_tail map is applied whatever
/// `cfg.transform` says. The integrand is never evaluated at the endpoints,
/// so integrable endpoint singularities are tolerated. Never throws on
/// non-convergence; inspect `converged`.
QuadratureResult integrate_gk(const Integrand& f, double a, double b,
                              const QuadratureConfig& cfg = {});

/// As integrate_gk with the domain pre-split at `breakpoints` (sorted,
/// including both endpoints). The error target applies to the whole range.
QuadratureResult integrate_gk(const Integrand& f, std::span<const double> breakpoints,
                              const QuadratureConfig& cfg = {});

/// Adaptive integral of f over (a, b); throws QuadratureError carrying the
/// best estimate and its error bound when the target is not met.
double integrate_adaptive(const Integrand& f, double a, double b,
                          const QuadratureConfig& cfg = {});

double integrate_adaptive(const Integrand& f, std::span<const double> breakpoints,
                          const QuadratureConfig& cfg = {});

}  // namespace regen
