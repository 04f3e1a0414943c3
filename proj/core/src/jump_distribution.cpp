#include <algorithm>
#include <cmath>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "regen/levy_model.hpp"

namespace regen {

namespace {

double parse_double(std::string_view text, std::string_view what) {
  const std::string owned(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(owned, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != owned.size())
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + owned + "'");
  return value;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

JumpDistribution JumpDistribution::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("exponential jump law: rate must be finite and > 0");
  JumpDistribution d;
  d.kind_ = Kind::exponential;
  d.rate_ = rate;
  return d;
}

JumpDistribution JumpDistribution::deterministic(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument("deterministic jump law: value must be finite and > 0");
  JumpDistribution d;
  d.kind_ = Kind::deterministic;
  d.value_ = value;
  return d;
}

JumpDistribution JumpDistribution::table(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("table jump law: need equally many atoms and weights");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] > 0.0) || !std::isfinite(atoms[i]))
      throw std::invalid_argument("table jump law: atoms must be finite and > 0");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw std::invalid_argument("table jump law: weights must be finite and >= 0");
    total += weights[i];
  }
  if (!(total > 0.0)) throw std::invalid_argument("table jump law: weights sum to zero");
  for (double& w : weights) w /= total;
  JumpDistribution d;
  d.kind_ = Kind::table;
  d.atoms_ = std::move(atoms);
  d.weights_ = std::move(weights);
  return d;
}

double JumpDistribution::mean() const {
  switch (kind_) {
    case Kind::exponential: return 1.0 / rate_;
    case Kind::deterministic: return value_;
    case Kind::table:
      return std::inner_product(atoms_.begin(), atoms_.end(), weights_.begin(), 0.0);
  }
  return 0.0;
}

double JumpDistribution::second_moment() const {
  switch (kind_) {
    case Kind::exponential: return 2.0 / (rate_ * rate_);
    case Kind::deterministic: return value_ * value_;
    case Kind::table: {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i) acc += weights_[i] * atoms_[i] * atoms_[i];
      return acc;
    }
  }
  return 0.0;
}

double JumpDistribution::variance() const {
  switch (kind_) {
    case Kind::exponential: return 1.0 / (rate_ * rate_);
    case Kind::deterministic: return 0.0;
    case Kind::table: {
      const double m = mean();
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        acc += weights_[i] * (atoms_[i] - m) * (atoms_[i] - m);
      return acc;
    }
  }
  return 0.0;
}

double JumpDistribution::expectation(const std::function<double(double)>& g,
                                     const QuadratureConfig& cfg) const {
  return expectation_below(g, INFINITY, cfg);
}

double JumpDistribution::expectation_below(const std::function<double(double)>& g, double bound,
                                           const QuadratureConfig& cfg) const {
  switch (kind_) {
    case Kind::exponential: {
      if (!(bound > 0.0)) return 0.0;
      QuadratureConfig c = cfg;
      c.transform = QuadratureTransform::exp_tail;
      c.tail_rate = 0.5 * rate_;
      const double r = rate_;
      return integrate_adaptive([&g, r](double x) { return g(x) * r * std::exp(-r * x); }, 0.0,
                                bound, c);
    }
    case Kind::deterministic: return value_ < bound ? g(value_) : 0.0;
    case Kind::table: {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i] < bound) acc += weights_[i] * g(atoms_[i]);
      return acc;
    }
  }
  return 0.0;
}

double JumpDistribution::tail_mass(double threshold) const {
  switch (kind_) {
    case Kind::exponential: return threshold <= 0.0 ? 1.0 : std::exp(-rate_ * threshold);
    case Kind::deterministic: return value_ >= threshold ? 1.0 : 0.0;
    case Kind::table: {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i] >= threshold) acc += weights_[i];
      return acc;
    }
  }
  return 0.0;
}

double JumpDistribution::sample(RandomStream& rng) const { return sample_at_least(0.0, rng); }

double JumpDistribution::sample_at_least(double threshold, RandomStream& rng) const {
  switch (kind_) {
    case Kind::exponential: return std::max(threshold, 0.0) + rng.exponential() / rate_;
    case Kind::deterministic:
      if (value_ < threshold)
        throw std::invalid_argument("deterministic jump law has no mass above threshold");
      return value_;
    case Kind::table: {
      const double mass = tail_mass(threshold);
      if (!(mass > 0.0)) throw std::invalid_argument("table jump law has no mass above threshold");
      const double target = rng.uniform() * mass;
      double acc = 0.0;
      double last = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i] < threshold) continue;
        acc += weights_[i];
        last = atoms_[i];
        if (target < acc) return atoms_[i];
      }
      return last;
    }
  }
  return 0.0;
}

std::string JumpDistribution::spec() const {
  switch (kind_) {
    case Kind::exponential: return "exp:" + format_double(rate_);
    case Kind::deterministic: return "det:" + format_double(value_);
    case Kind::table: {
      std::string out = "table:";
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) out += ',';
        out += format_double(atoms_[i]) + "/" + format_double(weights_[i]);
      }
      return out;
    }
  }
  return {};
}

JumpDistribution JumpDistribution::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("jump law spec must look like kind:params, got '" +
                                std::string(spec) + "'");
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view body = spec.substr(colon + 1);
  if (kind == "exp") return exponential(parse_double(body, "exponential rate"));
  if (kind == "det") return deterministic(parse_double(body, "deterministic jump"));
  if (kind == "table") {
    std::vector<double> atoms, weights;
    std::size_t start = 0;
    while (start <= body.size()) {
      const auto comma = body.find(',', start);
      const std::string_view item =
          body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      const auto slash = item.find('/');
      if (slash == std::string_view::npos)
        throw std::invalid_argument("table entries must be atom/weight, got '" + std::string(item) +
                                    "'");
      atoms.push_back(parse_double(item.substr(0, slash), "table atom"));
      weights.push_back(parse_double(item.substr(slash + 1), "table weight"));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return table(std::move(atoms), std::move(weights));
  }
  throw std::invalid_argument("unknown jump law '" + std::string(kind) + "'");
}

}  // namespace regen
