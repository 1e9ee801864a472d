#pragma once

// Stochastic resonance: the noise level eps maximizing the Fisher
// information 1 / Sigma(theta) of either estimator.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sresonance/errors.hpp"
#include "sresonance/estimators.hpp"
#include "sresonance/invariant_law.hpp"
#include "sresonance/numerics.hpp"
#include "sresonance/parallel.hpp"

namespace sres {

struct CurvePoint {
  double eps;
  double fisher;
  /// False when the variance could not be evaluated (vanishing tails at
  /// extreme eps); fisher is then reported as 0, the limiting value.
  bool ok;
};

struct ResonanceResult {
  double eps_star;
  double fisher_star;
  std::vector<Extremum> local_maxima;
  std::vector<CurvePoint> curve;
  Scheme scheme;

  bool multi_resonance() const { return local_maxima.size() > 1; }
};

/// Fisher information of the chosen scheme at (theta, eps). Numerical
/// failures at extreme eps map to {0, false}.
inline CurvePoint fisher_at(double theta, double eps, double tau, const InvariantLaw& law,
                            Scheme scheme) {
  const ChannelConfig ch{tau, eps, law};
  try {
    return {eps, asymptotic_variance(theta, ch, scheme).fisher, true};
  } catch (const NonFinite&) {
    return {eps, 0.0, false};
  } catch (const NonConvergence&) {
    return {eps, 0.0, false};
  }
}

inline std::vector<CurvePoint> resonance_curve(double theta, double tau, const InvariantLaw& law,
                                               Scheme scheme, std::span<const double> eps_grid,
                                               unsigned workers = default_workers()) {
  if (eps_grid.empty()) throw ConfigError("noise-level grid is empty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0)) throw ConfigError("noise-level grid must be positive");
    if (i > 0 && !(eps_grid[i] > eps_grid[i - 1]))
      throw ConfigError("noise-level grid must be strictly increasing");
  }
  return parallel_map(
      eps_grid.size(), [&](std::size_t i) { return fisher_at(theta, eps_grid[i], tau, law, scheme); },
      workers);
}

/// Maximizes eps -> fisher(eps) over the bracket; every interior local
/// maximum is reported so multi-resonance is visible.
inline ResonanceResult find_resonance(double theta, double tau, const InvariantLaw& law,
                                      Scheme scheme, Bracket bracket = {0.02, 3.0},
                                      double tol = 1e-5, int grid_n = 64) {
  bracket.validate();
  if (!(bracket.lo > 0.0)) throw ConfigError("noise-level bracket must be positive");
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(grid_n));
  // The first grid_n evaluations are the coarse scan.
  auto objective = [&](double eps) {
    const auto p = fisher_at(theta, eps, tau, law, scheme);
    if (curve.size() < static_cast<std::size_t>(grid_n)) curve.push_back(p);
    return p.fisher;
  };
  auto m = maximize_scalar(objective, bracket, grid_n, tol);
  return {m.x_star, m.h_star, std::move(m.local_maxima), std::move(curve), scheme};
}

}  // namespace sres
