#include "regen/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace regen {

namespace {

// Kronrod 15-point abscissae on [-1, 1]; odd indices are the Gauss 7-point nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

bool by_error(const Panel& lhs, const Panel& rhs) { return lhs.error < rhs.error; }

// One Gauss-Kronrod (7, 15) panel with the QUADPACK error heuristic.
Panel gk15(const Integrand& f, double a, double b, int& evals) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> fv1{}, fv2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(centre - dx);
    const double f2 = f(centre + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double scale = std::abs(half);
  double err = std::abs((resk - resg) * half);
  resasc *= scale;
  resabs *= scale;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
  if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
  return {a, b, resk * half, err};
}

QuadratureResult run_adaptive(const Integrand& g, std::span<const double> cuts,
                              const QuadratureConfig& cfg) {
  QuadratureResult out;
  std::vector<Panel> heap;
  heap.reserve(static_cast<std::size_t>(cfg.max_subdivisions) + cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) heap.push_back(gk15(g, cuts[i], cuts[i + 1], out.evaluations));
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto totals = [&heap](double& value, double& error) {
    value = 0.0;
    error = 0.0;
    for (const Panel& p : heap) {
      value += p.value;
      error += p.error;
    }
  };

  double value = 0.0;
  double error = 0.0;
  totals(value, error);
  int panels = static_cast<int>(heap.size());
  while (!heap.empty()) {
    const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
    if (error <= target) {
      out.converged = true;
      break;
    }
    if (panels >= cfg.max_subdivisions) break;
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        std::abs(worst.b - worst.a) <= 4.0 * kEps * std::max(std::abs(mid), kTiny)) {
      // Panel cannot be resolved further in double precision.
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    heap.pop_back();
    const Panel left = gk15(g, worst.a, mid, out.evaluations);
    const Panel right = gk15(g, mid, worst.b, out.evaluations);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    ++panels;
  }
  totals(value, error);
  out.value = value;
  out.abs_error = error;
  out.subdivisions = panels;
  if (!out.converged)
    out.converged = error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
  return out;
}

[[noreturn]] void throw_nonconvergence(const QuadratureResult& r, const QuadratureConfig& cfg) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "integrate_adaptive: no convergence after " << r.subdivisions
      << " subdivisions (estimate " << r.value << ", error bound " << r.abs_error
      << ", abs_tol " << cfg.abs_tol << ", rel_tol " << cfg.rel_tol << ")";
  throw QuadratureError(msg.str(), r.value, r.abs_error);
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureConfig: abs_tol must be > 0");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureConfig: rel_tol must be > 0");
  if (max_subdivisions < 1)
    throw std::invalid_argument("QuadratureConfig: max_subdivisions must be >= 1");
  if (!(tail_rate > 0.0)) throw std::invalid_argument("QuadratureConfig: tail_rate must be > 0");
}

QuadratureResult integrate_gk(const Integrand& f, std::span<const double> breakpoints,
                              const QuadratureConfig& cfg) {
  cfg.validate();
  if (breakpoints.size() < 2)
    throw std::invalid_argument("integrate_gk: need at least two breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw std::invalid_argument("integrate_gk: breakpoints must be sorted");
  const double a = breakpoints.front();
  const double b = breakpoints.back();
  if (!std::isfinite(a)) throw std::invalid_argument("integrate_gk: lower limit must be finite");
  if (std::isnan(b)) throw std::invalid_argument("integrate_gk: upper limit is NaN");
  if (a == b) return {0.0, 0.0, 0, 0, true};

  const bool mapped = cfg.transform == QuadratureTransform::exp_tail || std::isinf(b);
  if (!mapped) return run_adaptive(f, breakpoints, cfg);

  const double rate = cfg.tail_rate;
  std::vector<double> cuts(breakpoints.size());
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double x = breakpoints[i];
    cuts[i] = std::isinf(x) ? 1.0 : -std::expm1(-rate * (x - a));
  }
  const Integrand mapped_f = [&f, a, rate](double u) {
    // cuts far out in x round onto u = 1; the integrand has decayed there
    if (!(u < 1.0)) return 0.0;
    const double x = a - std::log1p(-u) / rate;
    return f(x) / (rate * (1.0 - u));
  };
  return run_adaptive(mapped_f, cuts, cfg);
}

QuadratureResult integrate_gk(const Integrand& f, double a, double b,
                              const QuadratureConfig& cfg) {
  if (b < a) {
    QuadratureResult r = integrate_gk(f, b, a, cfg);
    r.value = -r.value;
    return r;
  }
  const std::array<double, 2> ends{a, b};
  return integrate_gk(f, std::span<const double>(ends), cfg);
}

double integrate_adaptive(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
  const QuadratureResult r = integrate_gk(f, a, b, cfg);
  if (!r.converged) throw_nonconvergence(r, cfg);
  return r.value;
}

double integrate_adaptive(const Integrand& f, std::span<const double> breakpoints,
                          const QuadratureConfig& cfg) {
  const QuadratureResult r = integrate_gk(f, breakpoints, cfg);
  if (!r.converged) throw_nonconvergence(r, cfg);
  return r.value;
}

}  // namespace regen
