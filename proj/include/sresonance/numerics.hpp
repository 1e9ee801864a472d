#pragma once

// Shared numerical kernels: the error-function family, improper-integral
// quadrature, bracketed root finding and scalar maximization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "sresonance/errors.hpp"

namespace sres {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadratureConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || (rel_tol == 0.0 && abs_tol == 0.0))
      throw ConfigError("quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw ConfigError("max_subdivisions must be >= 1");
  }
};

struct Bracket {
  double lo;
  double hi;

  void validate() const {
    if (!(lo < hi)) throw ConfigError("bracket requires lo < hi");
  }
  double width() const { return hi - lo; }
};

// ---------------------------------------------------------------------------
// Error function family (standard 2/sqrt(pi) normalization).

inline double erf(double x) { return std::erf(x); }
inline double erfc(double x) { return std::erfc(x); }

/// Standard normal distribution function. Uses erfc so the lower tail keeps
/// full relative precision.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Inverse of erf on (-1, 1).
inline double erf_inv(double p) {
  if (!(p > -1.0 && p < 1.0)) throw OutOfRange("erf_inv argument must lie in (-1, 1)");
  return boost::math::erf_inv(p);
}

/// Inverse of erfc on (0, 2).
inline double erfc_inv(double q) {
  if (!(q > 0.0 && q < 2.0)) throw OutOfRange("erfc_inv argument must lie in (0, 2)");
  return boost::math::erfc_inv(q);
}

// ---------------------------------------------------------------------------
// Quadrature.

namespace detail {

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double l1;
  std::size_t segment;

  bool operator<(const Panel& o) const { return error < o.error; }
};

// Maps t in a finite interval onto one x-segment of the integration domain.
enum class Map { finite, whole_line, right_tail, left_tail };

struct Segment {
  Map map;
  double lo;
  double hi;
};

template <class F>
double mapped_value(const F& f, const Segment& s, double t) {
  switch (s.map) {
    case Map::finite:
      return f(t);
    case Map::whole_line: {
      // x = t / (1 - t^2), t in (-1, 1)
      const double t2 = t * t;
      const double inv = 1.0 / (1.0 - t2);
      const double w = (1.0 + t2) * inv * inv;
      if (!std::isfinite(w)) return 0.0;
      const double v = f(t * inv);
      return v == 0.0 ? 0.0 : v * w;
    }
    case Map::right_tail: {
      // x = lo + t / (1 - t), t in [0, 1)
      const double inv = 1.0 / (1.0 - t);
      if (!std::isfinite(inv * inv)) return 0.0;
      const double v = f(s.lo + t * inv);
      return v == 0.0 ? 0.0 : v * inv * inv;
    }
    case Map::left_tail: {
      // x = hi - t / (1 - t), t in [0, 1)
      const double inv = 1.0 / (1.0 - t);
      if (!std::isfinite(inv * inv)) return 0.0;
      const double v = f(s.hi - t * inv);
      return v == 0.0 ? 0.0 : v * inv * inv;
    }
  }
  return 0.0;
}

inline std::pair<double, double> t_range(const Segment& s) {
  switch (s.map) {
    case Map::finite: return {s.lo, s.hi};
    case Map::whole_line: return {-1.0, 1.0};
    case Map::right_tail:
    case Map::left_tail: return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

template <class F>
Panel gk15(const F& f, const Segment& s, std::size_t seg, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto g = [&](double t) { return mapped_value(f, s, t); };
  double err = 0.0;
  double l1 = 0.0;
  const double v = GK::integrate(g, a, b, 0, 0.0, &err, &l1);
  if (!std::isfinite(v) || !std::isfinite(err))
    throw NonFinite("integrand is not finite on [" + std::to_string(a) + ", " +
                    std::to_string(b) + "] of the mapped domain");
  return {a, b, v, err, l1, seg};
}

}  // namespace detail

/// Integrates f over [lo, hi]; either limit may be infinite. Interior
/// breakpoints (kinks, discontinuities, narrow peaks) split the domain so no
/// panel straddles them. Each piece is mapped to a finite interval and the
/// panels are refined globally, largest error first, until
/// err <= max(abs_tol, rel_tol * |I|).
template <class F>
double integrate(const F& f, double lo, double hi, const QuadratureConfig& cfg = {},
                 std::span<const double> breakpoints = {}) {
  cfg.validate();
  if (std::isnan(lo) || std::isnan(hi)) throw ConfigError("integration limits are NaN");
  if (lo == hi) return 0.0;
  if (lo > hi) return -integrate(f, hi, lo, cfg, breakpoints);

  std::vector<double> cuts{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi && std::isfinite(b)) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<detail::Segment> segments;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    using detail::Map;
    if (std::isinf(a) && std::isinf(b))
      segments.push_back({Map::whole_line, a, b});
    else if (std::isinf(b))
      segments.push_back({Map::right_tail, a, b});
    else if (std::isinf(a))
      segments.push_back({Map::left_tail, a, b});
    else
      segments.push_back({Map::finite, a, b});
  }

  constexpr int kInitialPanels = 4;
  std::vector<detail::Panel> heap;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto [t0, t1] = detail::t_range(segments[s]);
    const double h = (t1 - t0) / kInitialPanels;
    for (int k = 0; k < kInitialPanels; ++k) {
      const double a = t0 + k * h;
      const double b = (k + 1 == kInitialPanels) ? t1 : a + h;
      heap.push_back(detail::gk15(f, segments[s], s, a, b));
    }
  }
  std::make_heap(heap.begin(), heap.end());

  double total = 0.0;
  double total_err = 0.0;
  double total_l1 = 0.0;
  // Running sums drift once the error has fallen by many orders of magnitude,
  // so every decision is confirmed against freshly summed panels.
  auto resum = [&] {
    total = total_err = total_l1 = 0.0;
    for (const auto& p : heap) {
      total += p.value;
      total_err += p.error;
      total_l1 += p.l1;
    }
  };
  const double roundoff = 100.0 * std::numeric_limits<double>::epsilon();
  auto converged = [&] {
    const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
    return total_err <= target || total_err <= roundoff * total_l1;
  };
  resum();
  int subdivisions = 0;
  while (true) {
    if (converged()) {
      resum();
      if (converged()) return total;
    }
    if (subdivisions >= cfg.max_subdivisions) {
      resum();
      if (converged()) return total;
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "quadrature did not converge on [%g, %g]: error estimate %.3e against value %.6e",
                    lo, hi, total_err, total);
      throw NonConvergence(msg);
    }
    std::pop_heap(heap.begin(), heap.end());
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push_back(worst);
      resum();
      if (converged()) return total;
      throw NonConvergence("quadrature panel collapsed below machine resolution");
    }
    auto left = detail::gk15(f, segments[worst.segment], worst.segment, worst.a, mid);
    auto right = detail::gk15(f, segments[worst.segment], worst.segment, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err = std::max(total_err + left.error + right.error - worst.error, 0.0);
    total_l1 += left.l1 + right.l1 - worst.l1;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    ++subdivisions;
    if (subdivisions % 64 == 0) resum();
  }
}

/// Integral of f over the whole real line, via x = t / (1 - t^2).
template <class F>
double integrate_line(const F& f, const QuadratureConfig& cfg = {}) {
  return integrate(f, -kInf, kInf, cfg);
}

/// Fixed-order Gauss-Legendre rule on [a, b]; used where the integrand is
/// smooth on a short interval and adaptivity would only cost time.
template <class F>
double gauss_legendre(const F& f, double a, double b) {
  // 10-point nodes and weights on [-1, 1].
  static constexpr double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                  0.8650633666889845, 0.9739065285171717};
  static constexpr double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                  0.1494513491505806, 0.0666713443086881};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  return s * h;
}

// ---------------------------------------------------------------------------
// Root finding.

/// Root of g inside the bracket, located to a bracket width of at most tol.
template <class G>
double find_root(const G& g, Bracket bracket, double tol = 1e-12) {
  bracket.validate();
  if (!(tol > 0.0)) throw ConfigError("root tolerance must be positive");
  const double glo = g(bracket.lo);
  const double ghi = g(bracket.hi);
  if (std::isnan(glo) || std::isnan(ghi)) throw NonFinite("root function is NaN at the bracket");
  if (glo == 0.0) return bracket.lo;
  if (ghi == 0.0) return bracket.hi;
  if ((glo < 0.0) == (ghi < 0.0))
    throw BadBracket("no sign change on [" + std::to_string(bracket.lo) + ", " +
                     std::to_string(bracket.hi) + "]");
  auto width_ok = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  std::uintmax_t iters = 500;
  auto [a, b] = boost::math::tools::toms748_solve(g, bracket.lo, bracket.hi, glo, ghi, width_ok,
                                                  iters);
  // TOMS748 can stall on flat plateaus; finish with bisection if it did.
  double fa = g(a);
  while (!width_ok(a, b)) {
    const double m = 0.5 * (a + b);
    if (!(m > a && m < b)) break;
    const double fm = g(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Scalar maximization.

struct Extremum {
  double x;
  double value;
};

struct MaximizeResult {
  double x_star;
  double h_star;
  /// Interior local maxima, refined, in increasing x.
  std::vector<Extremum> local_maxima;
  /// The coarse scan the candidates were taken from.
  std::vector<Extremum> samples;
};

/// Grid scan followed by bracketed refinement of every interior peak. The
/// global maximizer is chosen among the refined peaks and the two endpoints.
template <class H>
MaximizeResult maximize_scalar(const H& h, Bracket bracket, int grid_n = 64, double tol = 1e-6) {
  bracket.validate();
  if (grid_n < 16) throw ConfigError("maximize_scalar needs grid_n >= 16");
  if (!(tol > 0.0)) throw ConfigError("maximization tolerance must be positive");

  auto eval = [&h](double x) {
    const double v = h(x);
    if (!std::isfinite(v))
      throw NonFinite("objective is not finite at x = " + std::to_string(x));
    return v;
  };

  MaximizeResult out;
  out.samples.reserve(static_cast<std::size_t>(grid_n));
  const double step = bracket.width() / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) {
    const double x = (i + 1 == grid_n) ? bracket.hi : bracket.lo + i * step;
    out.samples.push_back({x, eval(x)});
  }

  // Bits of relative precision for Brent; limited to half the mantissa.
  const double scale = std::max({std::abs(bracket.lo), std::abs(bracket.hi), 1.0});
  const int bits = std::clamp(static_cast<int>(std::ceil(1.0 - std::log2(tol / scale))), 8,
                              std::numeric_limits<double>::digits / 2);

  const auto& s = out.samples;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!(s[i].value >= s[i - 1].value && s[i].value > s[i + 1].value)) continue;
    auto neg = [&eval](double x) { return -eval(x); };
    std::uintmax_t iters = 200;
    auto [x, v] = boost::math::tools::brent_find_minima(neg, s[i - 1].x, s[i + 1].x, bits, iters);
    Extremum e{x, -v};
    if (e.value < s[i].value) e = s[i];
    out.local_maxima.push_back(e);
  }

  Extremum best = s.front().value >= s.back().value ? s.front() : s.back();
  for (const auto& e : out.local_maxima)
    if (e.value > best.value) best = e;
  out.x_star = best.x;
  out.h_star = best.value;
  return out;
}

}  // namespace sres
