#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regen/quadrature.hpp"
#include "regen/random.hpp"

namespace regen {

/// Law of the jump size xi of a compound Poisson subordinator.
class JumpDistribution {
 public:
  enum class Kind { exponential, deterministic, table };

  static JumpDistribution exponential(double rate);
  static JumpDistribution deterministic(double value);
  /// Discrete law on positive atoms; weights are normalized.
  static JumpDistribution table(std::vector<double> atoms, std::vector<double> weights);

  Kind kind() const noexcept { return kind_; }
  double rate() const noexcept { return rate_; }
  double value() const noexcept { return value_; }
  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double mean() const;
  double second_moment() const;
  double variance() const;

  /// E g(xi). Exponential laws are integrated with adaptive quadrature.
  double expectation(const std::function<double(double)>& g,
                     const QuadratureConfig& cfg = {}) const;
  /// E[g(xi); xi < bound].
  double expectation_below(const std::function<double(double)>& g, double bound,
                           const QuadratureConfig& cfg = {}) const;

  /// P{xi >= threshold}.
  double tail_mass(double threshold) const;
  double sample(RandomStream& rng) const;
  /// Sample from the law of xi conditioned on xi >= threshold.
  double sample_at_least(double threshold, RandomStream& rng) const;

  /// Compact text form: `exp:<rate>`, `det:<value>`, `table:<a>/<w>,...`.
  std::string spec() const;
  static JumpDistribution parse(std::string_view spec);

  bool operator==(const JumpDistribution&) const = default;

 private:
  JumpDistribution() = default;

  Kind kind_ = Kind::exponential;
  double rate_ = 1.0;
  double value_ = 0.0;
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

enum class ModelKind { compound_poisson, gamma, gamma_like };

std::string_view to_string(ModelKind kind);

/// Levy measure of a drift-free subordinator without killing:
///   gamma:      theta e^{-lambda x} / x
///   gamma_like: theta e^{-lambda x} / (1 - e^{-x})
///   compound Poisson: law of xi (total mass one).
/// Immutable after construction.
class LevyModel {
 public:
  static LevyModel gamma(double theta, double lambda);
  static LevyModel gamma_like(double theta, double lambda);
  static LevyModel compound_poisson(JumpDistribution jump);

  /// Parses `kind=gamma theta=1 lambda=1`, `kind=gammalike ...`,
  /// `kind=cp jump=exp rate=1`, `kind=cp jump=det value=0.5`,
  /// `kind=cp jump=table atoms=0.5/0.25,2/0.75`.
  static LevyModel parse(std::string_view descriptor);
  std::string descriptor() const;

  ModelKind kind() const noexcept { return kind_; }
  bool is_compound_poisson() const noexcept { return kind_ == ModelKind::compound_poisson; }
  double theta() const noexcept { return theta_; }
  double lambda() const noexcept { return lambda_; }
  const JumpDistribution& jump() const;

  /// Regular-variation index of phi(t) = Phi(e^t). Throws for compound
  /// Poisson models.
  double beta() const;
  /// Slowly varying factor ell(t); constant theta for the gamma families.
  double ell(double t) const;

  /// t above which phi() uses the closed-form expansion (infinite when the
  /// expansion never matched quadrature to 1e-6 up to 1e12).
  double phi_crossover() const noexcept { return phi_crossover_; }

  /// (1 - e^{-x}) times the Levy density; bounded with limit theta at 0.
  double tilted_density(double x) const;

 private:
  LevyModel() = default;
  void calibrate_crossover();

  ModelKind kind_ = ModelKind::gamma;
  double theta_ = 1.0;
  double lambda_ = 1.0;
  std::optional<JumpDistribution> jump_;
  double phi_crossover_ = INFINITY;
};

struct ModelMoments {
  double mu;
  double sigma2;
};

enum class PhiMethod { automatic, quadrature, asymptotic };

/// Quadrature defaults for the model functionals.
QuadratureConfig model_quadrature_config();

/// int g(x) nu(dx) where the caller supplies r(x, w) = g(x) / w with
/// w = 1 - e^{-x}, i.e. the singular factor already cancelled.
/// `upper` restricts the domain to (0, upper).
/// `hints` are interior x-points where the integrand changes scale.
double levy_integral(const LevyModel& model, const std::function<double(double, double)>& r,
                     const QuadratureConfig& cfg, double upper = INFINITY,
                     std::span<const double> hints = {});

double nu_density(const LevyModel& model, double x);

double phi(const LevyModel& model, double t, PhiMethod method = PhiMethod::automatic,
           const QuadratureConfig& cfg = model_quadrature_config());

/// Closed-form large-t expansion of Phi for the gamma families.
double phi_asymptotic(const LevyModel& model, double t);

/// phi'(t) = e^t Phi'(e^t).
double phi_log_derivative(const LevyModel& model, double t,
                          const QuadratureConfig& cfg = model_quadrature_config());

ModelMoments moments(const LevyModel& model);
/// int x nu(dx), int x^2 nu(dx) by quadrature; a check on moments().
ModelMoments moments_quadrature(const LevyModel& model,
                                const QuadratureConfig& cfg = model_quadrature_config());

/// Phi_L(n) = int (1 - e^{-n x}) nu(dx) in closed form.
double laplace_exponent_int(const LevyModel& model, std::uint64_t n);
double laplace_exponent_quadrature(const LevyModel& model, double n,
                                   const QuadratureConfig& cfg = model_quadrature_config());

/// mu^{-1} int_1^n x^{-1} Phi(x) dx, integrated in u = log x.
double centering(const LevyModel& model, double n);
/// centering() along an increasing grid, accumulating panel by panel.
std::vector<double> centering_grid(const LevyModel& model, const std::vector<double>& grid);

enum class NormalizationVariant { lil, clt };

double theorem_normalization(const LevyModel& model, double n, NormalizationVariant variant);

struct DeHaanRow {
  double factor;
  double t;
  double difference_ratio;  // (Phi(ct) - Phi(t)) / (beta (log t)^{beta-1} ell(log t))
  double log_factor;        // its limit
  double derivative_ratio;  // phi'(log t) / (beta (log t)^{beta-1} ell(log t)); limit 1
};

std::vector<DeHaanRow> check_de_haan(const LevyModel& model, const std::vector<double>& factors,
                                     const std::vector<double>& t_grid);

/// P{|log(1 - e^{-xi})| <= x} for the compound Poisson jump law.
double cp_hitting_cdf(const JumpDistribution& jump, double x);
/// m^{-1} int_0^t P{|log(1 - e^{-xi})| <= x} dx with m = E xi.
double cp_centering(const JumpDistribution& jump, double t);
/// (2 s^2 m^{-3} t log log t)^{1/2} with s^2 = Var xi, m = E xi; t > e.
double cp_lil_normalization(const JumpDistribution& jump, double t);

}  // namespace regen
