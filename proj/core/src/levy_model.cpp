#include "regen/levy_model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "regen/special_math.hpp"

namespace regen {

namespace {

constexpr double kCrossoverStart = 1e4;
constexpr double kCrossoverLimit = 1e12;
constexpr double kCrossoverAgreement = 1e-6;

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_positive(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || used == 0)
    throw std::invalid_argument("model descriptor: cannot parse " + key + "='" + text + "'");
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument("model descriptor: " + key + " must be finite and > 0");
  return v;
}

void require_gamma_family(const LevyModel& model, const char* what) {
  if (model.is_compound_poisson())
    throw std::invalid_argument(std::string(what) +
                                ": not available for compound Poisson models");
}

void check_positive_params(double theta, double lambda) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("Levy model: theta must be finite and > 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("Levy model: lambda must be finite and > 0");
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::compound_poisson: return "cp";
    case ModelKind::gamma: return "gamma";
    case ModelKind::gamma_like: return "gammalike";
  }
  return "?";
}

LevyModel LevyModel::gamma(double theta, double lambda) {
  check_positive_params(theta, lambda);
  LevyModel m;
  m.kind_ = ModelKind::gamma;
  m.theta_ = theta;
  m.lambda_ = lambda;
  m.calibrate_crossover();
  return m;
}

LevyModel LevyModel::gamma_like(double theta, double lambda) {
  check_positive_params(theta, lambda);
  LevyModel m;
  m.kind_ = ModelKind::gamma_like;
  m.theta_ = theta;
  m.lambda_ = lambda;
  m.calibrate_crossover();
  return m;
}

LevyModel LevyModel::compound_poisson(JumpDistribution jump) {
  LevyModel m;
  m.kind_ = ModelKind::compound_poisson;
  m.theta_ = 1.0;
  m.lambda_ = 0.0;
  m.jump_ = std::move(jump);
  return m;
}

void LevyModel::calibrate_crossover() {
  QuadratureConfig tight = model_quadrature_config();
  tight.abs_tol = 1e-12;
  tight.rel_tol = 1e-12;
  phi_crossover_ = INFINITY;
  for (double t = kCrossoverStart; t <= kCrossoverLimit; t *= 10.0) {
    const double quad = phi(*this, t, PhiMethod::quadrature, tight);
    if (std::abs(quad - phi_asymptotic(*this, t)) <= kCrossoverAgreement) {
      phi_crossover_ = t;
      return;
    }
  }
}

LevyModel LevyModel::parse(std::string_view descriptor) {
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(descriptor)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("model descriptor: expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    if (fields.count(key)) throw std::invalid_argument("model descriptor: duplicate key " + key);
    fields[key] = token.substr(eq + 1);
  }
  auto take = [&fields](const std::string& key) -> std::optional<std::string> {
    auto it = fields.find(key);
    if (it == fields.end()) return std::nullopt;
    std::string v = it->second;
    fields.erase(it);
    return v;
  };
  const auto kind = take("kind");
  if (!kind) throw std::invalid_argument("model descriptor: missing kind=");

  LevyModel model;
  if (*kind == "gamma" || *kind == "gammalike") {
    const auto theta = take("theta");
    const auto lambda = take("lambda");
    if (!theta || !lambda)
      throw std::invalid_argument("model descriptor: " + *kind + " needs theta= and lambda=");
    const double th = parse_positive(*theta, "theta");
    const double la = parse_positive(*lambda, "lambda");
    model = *kind == "gamma" ? gamma(th, la) : gamma_like(th, la);
  } else if (*kind == "cp") {
    const auto jump = take("jump");
    if (!jump) throw std::invalid_argument("model descriptor: cp needs jump=");
    if (*jump == "exp") {
      const auto rate = take("rate");
      if (!rate) throw std::invalid_argument("model descriptor: jump=exp needs rate=");
      model = compound_poisson(JumpDistribution::exponential(parse_positive(*rate, "rate")));
    } else if (*jump == "det") {
      const auto value = take("value");
      if (!value) throw std::invalid_argument("model descriptor: jump=det needs value=");
      model = compound_poisson(JumpDistribution::deterministic(parse_positive(*value, "value")));
    } else if (*jump == "table") {
      const auto atoms = take("atoms");
      if (!atoms) throw std::invalid_argument("model descriptor: jump=table needs atoms=");
      model = compound_poisson(JumpDistribution::parse("table:" + *atoms));
    } else {
      throw std::invalid_argument("model descriptor: unknown jump law '" + *jump + "'");
    }
  } else {
    throw std::invalid_argument("model descriptor: unknown kind '" + *kind + "'");
  }
  if (!fields.empty())
    throw std::invalid_argument("model descriptor: unexpected key '" + fields.begin()->first + "'");
  return model;
}

std::string LevyModel::descriptor() const {
  if (kind_ != ModelKind::compound_poisson) {
    return "kind=" + std::string(to_string(kind_)) + " theta=" + format_double(theta_) +
           " lambda=" + format_double(lambda_);
  }
  const JumpDistribution& j = *jump_;
  switch (j.kind()) {
    case JumpDistribution::Kind::exponential:
      return "kind=cp jump=exp rate=" + format_double(j.rate());
    case JumpDistribution::Kind::deterministic:
      return "kind=cp jump=det value=" + format_double(j.value());
    case JumpDistribution::Kind::table:
      return "kind=cp jump=table atoms=" + j.spec().substr(6);
  }
  return {};
}

const JumpDistribution& LevyModel::jump() const {
  if (!jump_) throw std::invalid_argument("Levy model: jump law only defined for compound Poisson");
  return *jump_;
}

double LevyModel::beta() const {
  require_gamma_family(*this, "beta");
  return 1.0;
}

double LevyModel::ell(double) const {
  require_gamma_family(*this, "ell");
  return theta_;
}

double LevyModel::tilted_density(double x) const {
  switch (kind_) {
    case ModelKind::gamma: return theta_ * std::exp(-lambda_ * x) * one_minus_exp_over(x);
    case ModelKind::gamma_like: return theta_ * std::exp(-lambda_ * x);
    case ModelKind::compound_poisson:
      throw std::invalid_argument("tilted_density: compound Poisson measures are atomic or exposed via jump()");
  }
  return 0.0;
}

QuadratureConfig model_quadrature_config() {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-10;
  cfg.max_subdivisions = 2000;
  return cfg;
}

double levy_integral(const LevyModel& model, const std::function<double(double, double)>& r,
                     const QuadratureConfig& cfg, double upper, std::span<const double> hints) {
  if (!(upper > 0.0)) return 0.0;
  if (model.is_compound_poisson()) {
    return model.jump().expectation_below(
        [&r](double x) {
          const double w = -std::expm1(-x);
          return r(x, w) * w;
        },
        upper, cfg);
  }
  QuadratureConfig c = cfg;
  c.transform = QuadratureTransform::exp_tail;
  c.tail_rate = 0.5 * model.lambda();
  std::vector<double> cuts{0.0};
  for (double h : hints)
    if (h > 0.0 && h < upper) cuts.push_back(h);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(upper);
  const Integrand f = [&model, &r](double x) {
    const double w = -std::expm1(-x);
    return model.tilted_density(x) * r(x, w);
  };
  return integrate_adaptive(f, cuts, c);
}

double nu_density(const LevyModel& model, double x) {
  if (!(x > 0.0)) throw std::domain_error("nu_density: x must be > 0");
  switch (model.kind()) {
    case ModelKind::gamma: return model.theta() * std::exp(-model.lambda() * x) / x;
    case ModelKind::gamma_like:
      return model.theta() * std::exp(-model.lambda() * x) / -std::expm1(-x);
    case ModelKind::compound_poisson:
      throw std::invalid_argument("nu_density: unsupported for compound Poisson; use jump()");
  }
  return 0.0;
}

double phi_asymptotic(const LevyModel& model, double t) {
  if (!(t > 0.0)) throw std::domain_error("phi_asymptotic: t must be > 0");
  switch (model.kind()) {
    // The constant is -theta log(lambda): the integral of 1/|log(1-y)| - 1/y
    // over (0,1) equals -gamma and cancels the Euler term of the harmonic part.
    case ModelKind::gamma: return model.theta() * (std::log(t) - std::log(model.lambda()));
    case ModelKind::gamma_like: return model.theta() * (std::log(t) - digamma(model.lambda()));
    case ModelKind::compound_poisson:
      throw std::invalid_argument("phi_asymptotic: not available for compound Poisson models");
  }
  return 0.0;
}

double phi(const LevyModel& model, double t, PhiMethod method, const QuadratureConfig& cfg) {
  if (!(t >= 0.0)) throw std::domain_error("phi: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (method == PhiMethod::asymptotic ||
      (method == PhiMethod::automatic && t >= model.phi_crossover()))
    return phi_asymptotic(model, t);
  // (1 - exp(-t w)) / w, with w = 1 - e^{-x}.
  const auto r = [t](double, double w) { return t * one_minus_exp_over(t * w); };
  const std::array<double, 2> hints{1.0 / t, 30.0 / t};
  return levy_integral(model, r, cfg, INFINITY, hints);
}

double phi_log_derivative(const LevyModel& model, double t, const QuadratureConfig& cfg) {
  const double s = std::exp(t);
  if (!std::isfinite(s)) throw std::domain_error("phi_log_derivative: e^t overflows");
  const auto r = [s](double, double w) { return s * std::exp(-s * w); };
  const std::array<double, 2> hints{1.0 / s, 30.0 / s};
  return levy_integral(model, r, cfg, INFINITY, hints);
}

ModelMoments moments(const LevyModel& model) {
  switch (model.kind()) {
    case ModelKind::gamma: {
      const double th = model.theta(), la = model.lambda();
      return {th / la, th / (la * la)};
    }
    case ModelKind::gamma_like: {
      const double th = model.theta(), la = model.lambda();
      return {th * trigamma(la), -th * tetragamma(la)};
    }
    case ModelKind::compound_poisson: {
      const JumpDistribution& j = model.jump();
      return {j.mean(), j.second_moment()};
    }
  }
  return {0.0, 0.0};
}

ModelMoments moments_quadrature(const LevyModel& model, const QuadratureConfig& cfg) {
  const auto first = [](double x, double w) { return w == 0.0 ? 1.0 : x / w; };
  const auto second = [](double x, double w) { return w == 0.0 ? 0.0 : x * x / w; };
  return {levy_integral(model, first, cfg), levy_integral(model, second, cfg)};
}

double laplace_exponent_int(const LevyModel& model, std::uint64_t n) {
  if (n == 0) return 0.0;
  const double nd = static_cast<double>(n);
  switch (model.kind()) {
    case ModelKind::gamma: return model.theta() * std::log1p(nd / model.lambda());
    case ModelKind::gamma_like: {
      // theta * sum_{k=0}^{n-1} 1 / (k + lambda)
      const double la = model.lambda();
      if (n <= 64) {
        double acc = 0.0;
        for (std::uint64_t k = 0; k < n; ++k) acc += 1.0 / (static_cast<double>(k) + la);
        return model.theta() * acc;
      }
      return model.theta() * (digamma(nd + la) - digamma(la));
    }
    case ModelKind::compound_poisson: {
      const JumpDistribution& j = model.jump();
      switch (j.kind()) {
        case JumpDistribution::Kind::exponential: return nd / (j.rate() + nd);
        case JumpDistribution::Kind::deterministic: return -std::expm1(-nd * j.value());
        case JumpDistribution::Kind::table: {
          double acc = 0.0;
          for (std::size_t i = 0; i < j.atoms().size(); ++i)
            acc += j.weights()[i] * -std::expm1(-nd * j.atoms()[i]);
          return acc;
        }
      }
    }
  }
  return 0.0;
}

double laplace_exponent_quadrature(const LevyModel& model, double n, const QuadratureConfig& cfg) {
  if (n == 0.0) return 0.0;
  const auto r = [n](double x, double w) {
    if (w == 0.0) return n;
    return -std::expm1(-n * x) / w;
  };
  return levy_integral(model, r, cfg);
}

namespace {

double phi_of_log(const LevyModel& model, double u) { return phi(model, std::exp(u)); }

// int_{lo}^{hi} phi(u) du, split where phi() changes branch.
double integrate_phi_log(const LevyModel& model, double lo, double hi) {
  if (hi <= lo) return 0.0;
  std::vector<double> cuts{lo};
  const double switch_at = std::log(model.phi_crossover());
  if (std::isfinite(switch_at) && switch_at > lo && switch_at < hi) cuts.push_back(switch_at);
  cuts.push_back(hi);
  QuadratureConfig cfg = model_quadrature_config();
  cfg.abs_tol = 1e-9;
  return integrate_adaptive([&model](double u) { return phi_of_log(model, u); }, cuts, cfg);
}

}  // namespace

double centering(const LevyModel& model, double n) {
  if (!(n >= 1.0)) throw std::domain_error("centering: n must be > 1");
  const double mu = moments(model).mu;
  return integrate_phi_log(model, 0.0, std::log(n)) / mu;
}

std::vector<double> centering_grid(const LevyModel& model, const std::vector<double>& grid) {
  const double mu = moments(model).mu;
  std::vector<double> out;
  out.reserve(grid.size());
  double acc = 0.0;
  double prev = 0.0;
  for (double n : grid) {
    if (!(n >= 1.0)) throw std::domain_error("centering_grid: entries must be >= 1");
    const double u = std::log(n);
    if (u < prev) throw std::invalid_argument("centering_grid: grid must be increasing");
    acc += integrate_phi_log(model, prev, u);
    prev = u;
    out.push_back(acc / mu);
  }
  return out;
}

double theorem_normalization(const LevyModel& model, double n, NormalizationVariant variant) {
  const double beta = model.beta();
  const ModelMoments mom = moments(model);
  const double scale = mom.sigma2 / (mom.mu * mom.mu * mom.mu);
  if (variant == NormalizationVariant::clt) {
    if (!(n > 1.0)) throw std::domain_error("theorem_normalization(CLT): n must be > 1");
    return std::sqrt(scale * std::log(n)) * phi(model, n);
  }
  const double lll = std::log(std::log(std::log(n)));
  if (!(n > std::exp(std::exp(1.0))) || !(lll > 0.0))
    throw std::domain_error("theorem_normalization(LIL): n must exceed e^e");
  return std::sqrt(2.0 * scale / (2.0 * beta + 1.0) * std::log(n) * lll) * phi(model, n);
}

std::vector<DeHaanRow> check_de_haan(const LevyModel& model, const std::vector<double>& factors,
                                     const std::vector<double>& t_grid) {
  const double beta = model.beta();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > std::exp(1.0)))
      throw std::domain_error("check_de_haan: grid entries must exceed e");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("check_de_haan: grid must be increasing");
  }
  for (double c : factors)
    if (!(c > 0.0)) throw std::domain_error("check_de_haan: factors must be > 0");

  std::vector<DeHaanRow> rows;
  for (double t : t_grid) {
    const double lt = std::log(t);
    const double scale = beta * std::pow(lt, beta - 1.0) * model.ell(lt);
    const double base = phi(model, t, PhiMethod::quadrature);
    const double deriv = phi_log_derivative(model, lt) / scale;
    for (double c : factors) {
      const double shifted = c == 1.0 ? base : phi(model, c * t, PhiMethod::quadrature);
      rows.push_back({c, t, (shifted - base) / scale, std::log(c), deriv});
    }
  }
  return rows;
}

double cp_hitting_cdf(const JumpDistribution& jump, double x) {
  if (!(x > 0.0)) return 0.0;
  // |log(1 - e^{-xi})| <= x  <=>  xi >= -log(1 - e^{-x})
  const double threshold = -std::log(-std::expm1(-x));
  return jump.tail_mass(threshold);
}

double cp_centering(const JumpDistribution& jump, double t) {
  if (!(t > 0.0)) return 0.0;
  const double m = jump.mean();
  // Atom a contributes indicator{x >= -log(1 - e^{-a})}.
  auto atom_level = [](double a) { return -std::log(-std::expm1(-a)); };
  switch (jump.kind()) {
    case JumpDistribution::Kind::exponential: {
      // int_0^t (1 - e^{-x})^r dx = t - int_0^t (1 - (1 - e^{-x})^r) dx
      const double r = jump.rate();
      QuadratureConfig cfg = model_quadrature_config();
      cfg.transform = QuadratureTransform::exp_tail;
      cfg.tail_rate = 0.5;
      const double deficit = integrate_adaptive(
          [r](double x) { return -std::expm1(r * std::log1p(-std::exp(-x))); }, 0.0, t, cfg);
      return (t - deficit) / m;
    }
    case JumpDistribution::Kind::deterministic:
      return std::max(0.0, t - atom_level(jump.value())) / m;
    case JumpDistribution::Kind::table: {
      double acc = 0.0;
      for (std::size_t i = 0; i < jump.atoms().size(); ++i)
        acc += jump.weights()[i] * std::max(0.0, t - atom_level(jump.atoms()[i]));
      return acc / m;
    }
  }
  return 0.0;
}

double cp_lil_normalization(const JumpDistribution& jump, double t) {
  const double ll = std::log(std::log(t));
  if (!(t > std::exp(1.0)) || !(ll > 0.0))
    throw std::domain_error("cp_lil_normalization: t must exceed e");
  const double m = jump.mean();
  return std::sqrt(2.0 * jump.variance() / (m * m * m) * t * ll);
}

}  // namespace regen
