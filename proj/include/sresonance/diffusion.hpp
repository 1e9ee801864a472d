#pragma once

// Noise diffusions dX = S(X) dt + sigma(X) dW and the numerical checks for
// the existence of a stationary law.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sresonance/errors.hpp"
#include "sresonance/expression.hpp"
#include "sresonance/numerics.hpp"

namespace sres {

using Coefficient = std::function<double(double)>;

struct DiffusionSpec {
  Coefficient drift;      ///< S(x)
  Coefficient diffusion;  ///< sigma(x), strictly positive
  std::string label;

  /// Throws ConfigError unless both coefficients are finite and sigma > 0 on
  /// an evenly spaced probe grid over the range.
  void validate(Bracket probe = {-50.0, 50.0}, int points = 201) const {
    if (!drift || !diffusion) throw ConfigError("diffusion spec '" + label + "' is incomplete");
    for (int i = 0; i < points; ++i) {
      const double x = probe.lo + (probe.hi - probe.lo) * i / (points - 1);
      const double s = drift(x);
      const double g = diffusion(x);
      if (!std::isfinite(s) || !std::isfinite(g))
        throw ConfigError("coefficients of '" + label + "' are not finite at x = " +
                          std::to_string(x));
      if (!(g > 0.0))
        throw ConfigError("diffusion coefficient of '" + label + "' is not positive at x = " +
                          std::to_string(x));
    }
  }
};

/// Standard Ornstein-Uhlenbeck noise: S(x) = -x, sigma(x) = 1.
inline DiffusionSpec ou_spec() {
  return {[](double x) { return -x; }, [](double) { return 1.0; }, "ou"};
}

/// Spec from coefficient expressions in x, e.g. ("-x^3", "1").
inline DiffusionSpec expression_spec(const std::string& drift, const std::string& diffusion) {
  auto s = Expression::parse(drift);
  auto g = Expression::parse(diffusion);
  return {std::move(s), std::move(g), "S=" + drift + ", sigma=" + diffusion};
}

struct ErgodicityReport {
  double c2_left_limit;   ///< int_0^{probe.lo} S/sigma^2
  double c2_right_limit;  ///< int_0^{probe.hi} S/sigma^2
  double G;               ///< normalizer; +inf when it diverges
  bool c2_holds;
  bool c3_holds;

  bool ergodic() const { return c2_holds && c3_holds; }
};

namespace detail {

/// Node of the log-density table: exponent = 2 int_0^x S/sigma^2 and
/// log_density = exponent - 2 log sigma(x) (unnormalized).
struct LawNode {
  double x;
  double exponent;
  double log_density;
};

struct Marched {
  std::vector<LawNode> nodes;        ///< in marching order, nodes[0].x == 0
  std::vector<double> cell_log_mass;  ///< log of int over [nodes[k], nodes[k+1]]
  bool hit_limit = false;             ///< stopped at the probe rather than by decay
};

inline double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a == kInf || b == kInf) return kInf;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// Marches from 0 towards `limit` in cells over which the log-density changes
/// by about one unit. Stops at the limit, or once the log-density has fallen
/// `drop` below the running maximum and keeps falling.
inline Marched march_log_density(const DiffusionSpec& spec, double limit, double drop = 800.0,
                                 std::size_t max_cells = 4'000'000) {
  const double dir = limit >= 0.0 ? 1.0 : -1.0;
  auto rate = [&spec](double u) {
    const double g = spec.diffusion(u);
    return 2.0 * spec.drift(u) / (g * g);
  };
  auto log_density_at = [&](double x0, double e0, double x) {
    const double e = e0 + gauss_legendre(rate, x0, x);
    return std::pair{e, e - 2.0 * std::log(spec.diffusion(x))};
  };

  Marched m;
  const double g0 = spec.diffusion(0.0);
  m.nodes.push_back({0.0, 0.0, -2.0 * std::log(g0)});
  double peak = m.nodes[0].log_density;
  constexpr double kMaxStep = 0.05;

  while (true) {
    const LawNode cur = m.nodes.back();
    if (std::abs(cur.x) >= std::abs(limit)) {
      m.hit_limit = true;
      break;
    }
    if (m.nodes.size() > max_cells)
      throw NonConvergence("stationary density table exceeded its size budget");
    const double slope = std::abs(rate(cur.x));
    const double min_step = 1e-9 * std::max(1.0, std::abs(cur.x));
    double h = std::clamp(1.0 / std::max(slope, 1e-300), min_step, kMaxStep);
    double next = cur.x + dir * h;
    if (std::abs(next) > std::abs(limit)) next = limit;
    auto [e1, l1] = log_density_at(cur.x, cur.exponent, next);
    // Shrink until the change across the cell is moderate.
    while (std::abs(l1 - cur.log_density) > 2.0 && std::abs(next - cur.x) > min_step) {
      next = cur.x + 0.5 * (next - cur.x);
      std::tie(e1, l1) = log_density_at(cur.x, cur.exponent, next);
    }
    if (!std::isfinite(e1) || !std::isfinite(l1)) {
      // Diverging exponent: the density is not normalizable in this direction.
      m.nodes.push_back({next, e1, l1});
      m.cell_log_mass.push_back(kInf);
      m.hit_limit = true;
      break;
    }
    const double ref = std::max(cur.log_density, l1);
    const double a = std::min(cur.x, next);
    const double b = std::max(cur.x, next);
    const double mass = gauss_legendre(
        [&](double x) { return std::exp(log_density_at(cur.x, cur.exponent, x).second - ref); },
        a, b);
    m.cell_log_mass.push_back(ref + std::log(mass));
    m.nodes.push_back({next, e1, l1});
    peak = std::max(peak, l1);
    if (l1 < peak - drop && l1 < cur.log_density) break;
  }
  return m;
}

}  // namespace detail

/// Checks the ergodicity conditions numerically at finite probes.
///
/// (C2) holds when int_0^y S/sigma^2 is negative and strictly decreasing along
/// y = p/4, p/2, p on both sides; this is a trend heuristic, the limit itself
/// is not computable. (C3) holds when the normalizer G is finite and the
/// density at both probes carries a negligible share (1e-6) of it.
inline ErgodicityReport check_ergodicity(const DiffusionSpec& spec, Bracket probe = {-50.0, 50.0}) {
  probe.validate();
  if (!(probe.lo < 0.0 && probe.hi > 0.0)) throw ConfigError("probe range must contain 0");
  spec.validate(probe);

  auto ratio = [&spec](double u) {
    const double g = spec.diffusion(u);
    return spec.drift(u) / (g * g);
  };
  const QuadratureConfig qc{1e-10, 1e-12, 4000};
  auto exponent_to = [&](double y) { return integrate(ratio, 0.0, y, qc); };

  ErgodicityReport r{};
  auto trend_ok = [&](double p) {
    const double i4 = exponent_to(0.25 * p);
    const double i2 = exponent_to(0.5 * p);
    const double i1 = exponent_to(p);
    return std::pair{i1, i1 < i2 && i2 < i4 && i4 < 0.0};
  };
  const auto [left, left_ok] = trend_ok(probe.lo);
  const auto [right, right_ok] = trend_ok(probe.hi);
  r.c2_left_limit = left;
  r.c2_right_limit = right;
  r.c2_holds = left_ok && right_ok;

  const auto lm = detail::march_log_density(spec, probe.lo);
  const auto rm = detail::march_log_density(spec, probe.hi);
  double log_g = -kInf;
  for (double v : lm.cell_log_mass) log_g = detail::log_sum_exp(log_g, v);
  for (double v : rm.cell_log_mass) log_g = detail::log_sum_exp(log_g, v);
  r.G = std::exp(log_g);

  bool tails_small = true;
  for (const auto* m : {&lm, &rm}) {
    if (!m->hit_limit) continue;
    const auto& end = m->nodes.back();
    const double span = std::abs(end.x);
    // density * span relative to G, in logs
    if (!std::isfinite(end.log_density) || end.log_density + std::log(span) - log_g > std::log(1e-6))
      tails_small = false;
  }
  // Mass still arriving at a probe means the integral over the line diverges.
  if (!tails_small) r.G = kInf;
  r.c3_holds = std::isfinite(r.G) && r.G > 0.0;
  return r;
}

}  // namespace sres
