#pragma once

// Euler-Maruyama sample paths of the noise and the two threshold
// observables: time fraction above threshold and observed energy.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "sresonance/diffusion.hpp"
#include "sresonance/errors.hpp"

namespace sres {

struct SimConfig {
  double T = 1000.0;
  double dt = 0.01;
  std::uint64_t seed = 1;
  double x0 = 0.0;

  /// Number of grid intervals, floor(T/dt) with a guard against T/dt landing
  /// a rounding error below an integer.
  std::size_t steps() const { return static_cast<std::size_t>(std::floor(T / dt * (1.0 + 1e-12))); }

  void validate() const {
    if (!(dt > 0.0) || !(T >= dt) || !std::isfinite(T))
      throw ConfigError("simulation requires 0 < dt <= T");
    if (T / dt > 4e9) throw ConfigError("T/dt is too large for one path");
    if (!std::isfinite(x0)) throw ConfigError("initial value must be finite");
  }
};

struct Trajectory {
  std::vector<double> values;  ///< path at times k*dt, k = 0..steps
  double dt = 0.0;
  std::uint64_t seed = 0;

  double horizon() const { return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1); }
};

struct ObservationSummary {
  double gamma_T;  ///< fraction of [0, T] spent above the threshold
  double nu_T;     ///< time-averaged squared signal above the threshold
  double T;
};

/// Standard normal increments from a seeded mt19937_64.
class SeededNormals {
 public:
  explicit SeededNormals(std::uint64_t seed) : gen_(seed) {}
  double operator()() { return dist_(gen_); }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

/// X_{k+1} = X_k + S(X_k) dt + sigma(X_k) sqrt(dt) Z_k, with Z_k drawn from
/// `normals`. Throws NumericBlowup once |X| exceeds 1e12.
template <class Normals>
Trajectory simulate_path(const DiffusionSpec& spec, const SimConfig& cfg, Normals&& normals) {
  cfg.validate();
  const std::size_t n = cfg.steps();
  const double sq = std::sqrt(cfg.dt);
  Trajectory tr;
  tr.dt = cfg.dt;
  tr.seed = cfg.seed;
  tr.values.resize(n + 1);
  double x = cfg.x0;
  tr.values[0] = x;
  for (std::size_t k = 0; k < n; ++k) {
    x += spec.drift(x) * cfg.dt + spec.diffusion(x) * sq * normals();
    if (!(std::abs(x) <= 1e12))
      throw NumericBlowup("path left |x| <= 1e12 at step " + std::to_string(k + 1) +
                          "; check coefficients or reduce dt");
    tr.values[k + 1] = x;
  }
  return tr;
}

/// Path driven by the generator seeded with cfg.seed; same (spec, cfg) gives
/// the same path bit for bit.
inline Trajectory simulate_path(const DiffusionSpec& spec, const SimConfig& cfg) {
  return simulate_path(spec, cfg, SeededNormals(cfg.seed));
}

/// Y = theta + eps * X.
inline Trajectory perturb(const Trajectory& noise, double theta, double eps) {
  if (!(eps > 0.0)) throw ConfigError("noise level eps must be positive");
  Trajectory y = noise;
  for (double& v : y.values) v = theta + eps * v;
  return y;
}

/// Left-endpoint time averages of 1{Y > tau} and Y^2 1{Y > tau} over [0, T].
inline ObservationSummary observe(const Trajectory& y, double tau) {
  if (y.values.size() < 2) throw ConfigError("trajectory needs at least one time step");
  const std::size_t n = y.values.size() - 1;
  std::size_t above = 0;
  double energy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = y.values[k];
    if (v > tau) {
      ++above;
      energy += v * v;
    }
  }
  const double dn = static_cast<double>(n);
  return {static_cast<double>(above) / dn, energy / dn, y.dt * dn};
}

}  // namespace sres
