#pragma once

// Stationary (invariant) law of an ergodic noise diffusion:
//
//   f(x) = G^-1 sigma(x)^-2 exp{2 int_0^x S/sigma^2 du},   F(x) = int_{-inf}^x f.
//
// InvariantLaw is an immutable, cheaply copyable handle; it is safe to share
// across threads.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sresonance/diffusion.hpp"
#include "sresonance/errors.hpp"
#include "sresonance/numerics.hpp"

namespace sres {

enum class LawKind { ornstein_uhlenbeck, numeric };

class InvariantLaw {
 public:
  class Model {
   public:
    virtual ~Model() = default;
    virtual double pdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual double sf(double x) const = 0;
    virtual double quantile(double p) const = 0;
    virtual double inverse_sf(double q) const = 0;
    virtual double normalizer() const = 0;
    virtual double diffusion(double x) const = 0;
    virtual Bracket support() const = 0;
    virtual LawKind kind() const = 0;
    virtual const std::string& label() const = 0;
  };

  explicit InvariantLaw(std::shared_ptr<const Model> m) : model_(std::move(m)) {}

  /// Stationary density f.
  double pdf(double x) const { return model_->pdf(x); }
  /// Distribution function F.
  double cdf(double x) const { return model_->cdf(x); }
  /// Survival function 1 - F, accurate in the upper tail.
  double sf(double x) const { return model_->sf(x); }
  /// F^-1(p) for p in (0, 1).
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw OutOfRange("quantile level must lie in (0, 1)");
    return model_->quantile(p);
  }
  /// x with 1 - F(x) = q, for q in (0, 1); keeps precision for small q.
  double inverse_sf(double q) const {
    if (!(q > 0.0 && q < 1.0)) throw OutOfRange("survival level must lie in (0, 1)");
    return model_->inverse_sf(q);
  }
  /// Normalizer G (integral of the unnormalized density, exponent anchored at 0).
  double normalizer() const { return model_->normalizer(); }
  /// sigma(x) of the generating diffusion.
  double diffusion(double x) const { return model_->diffusion(x); }
  /// Range outside which the density is negligible (below 1e-300 of its peak).
  Bracket support() const { return model_->support(); }
  LawKind kind() const { return model_->kind(); }
  const std::string& label() const { return model_->label(); }

 private:
  std::shared_ptr<const Model> model_;
};

namespace detail {

class OuModel final : public InvariantLaw::Model {
 public:
  double pdf(double x) const override { return std::exp(-x * x) * std::numbers::inv_sqrtpi; }
  double cdf(double x) const override { return 0.5 * std::erfc(-x); }
  double sf(double x) const override { return 0.5 * std::erfc(x); }
  double quantile(double p) const override {
    return p < 0.5 ? -boost::math::erfc_inv(2.0 * p) : boost::math::erfc_inv(2.0 * (1.0 - p));
  }
  double inverse_sf(double q) const override { return boost::math::erfc_inv(2.0 * q); }
  double normalizer() const override { return std::sqrt(std::numbers::pi); }
  double diffusion(double) const override { return 1.0; }
  Bracket support() const override { return {-27.0, 27.0}; }
  LawKind kind() const override { return LawKind::ornstein_uhlenbeck; }
  const std::string& label() const override { return label_; }

 private:
  std::string label_ = "ou";
};

// Log-density table with exact completion between nodes: the density at any
// x is re-integrated from the nearest node on its left, and F, 1 - F add the
// mass of the partial cell to cached cumulative sums.
class NumericModel final : public InvariantLaw::Model {
 public:
  NumericModel(DiffusionSpec spec, double log_g, std::vector<LawNode> nodes,
               std::vector<double> left_mass, std::vector<double> right_mass)
      : spec_(std::move(spec)),
        log_g_(log_g),
        nodes_(std::move(nodes)),
        left_(std::move(left_mass)),
        right_(std::move(right_mass)) {}

  double pdf(double x) const override {
    const auto k = cell(x);
    if (k < 0) return 0.0;
    return std::exp(log_density(static_cast<std::size_t>(k), x) - log_g_);
  }

  double cdf(double x) const override {
    if (x <= nodes_.front().x) return 0.0;
    if (x >= nodes_.back().x) return 1.0;
    const auto k = static_cast<std::size_t>(cell(x));
    return std::min(1.0, left_[k] + partial_mass(k, nodes_[k].x, x));
  }

  double sf(double x) const override {
    if (x <= nodes_.front().x) return 1.0;
    if (x >= nodes_.back().x) return 0.0;
    const auto k = static_cast<std::size_t>(cell(x));
    return std::min(1.0, right_[k + 1] + partial_mass(k, x, nodes_[k + 1].x));
  }

  double quantile(double p) const override {
    if (p > 0.5) return inverse_sf(1.0 - p);
    const Bracket b = expand([this](double x) { return cdf(x); }, p, true);
    return find_root([&](double x) { return cdf(x) - p; }, b, 1e-13);
  }

  double inverse_sf(double q) const override {
    if (q > 0.5) return quantile(1.0 - q);
    const Bracket b = expand([this](double x) { return sf(x); }, q, false);
    return find_root([&](double x) { return q - sf(x); }, b, 1e-13);
  }

  double normalizer() const override { return std::exp(log_g_); }
  double diffusion(double x) const override { return spec_.diffusion(x); }
  Bracket support() const override { return {nodes_.front().x, nodes_.back().x}; }
  LawKind kind() const override { return LawKind::numeric; }
  const std::string& label() const override { return spec_.label; }

 private:
  // Index of the cell [x_k, x_{k+1}) containing x, or -1 outside the table.
  std::ptrdiff_t cell(double x) const {
    if (x < nodes_.front().x || x > nodes_.back().x) return -1;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                               [](double v, const LawNode& n) { return v < n.x; });
    auto k = std::distance(nodes_.begin(), it) - 1;
    return std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(nodes_.size()) - 2);
  }

  double log_density(std::size_t k, double x) const {
    const auto& n = nodes_[k];
    if (x == n.x) return n.log_density;
    auto rate = [this](double u) {
      const double g = spec_.diffusion(u);
      return 2.0 * spec_.drift(u) / (g * g);
    };
    const double e = n.exponent + gauss_legendre(rate, n.x, x);
    return e - 2.0 * std::log(spec_.diffusion(x));
  }

  double partial_mass(std::size_t k, double a, double b) const {
    if (b <= a) return 0.0;
    return gauss_legendre([&](double x) { return std::exp(log_density(k, x) - log_g_); }, a, b);
  }

  // Doubles [-1, 1] outward until the monotone function brackets the level.
  template <class Fn>
  static Bracket expand(const Fn& fn, double level, bool increasing) {
    double lo = -1.0;
    double hi = 1.0;
    for (int i = 0; i < 2000; ++i) {
      const double flo = fn(lo);
      const double fhi = fn(hi);
      const bool ok = increasing ? (flo <= level && level <= fhi) : (flo >= level && level >= fhi);
      if (ok) return {lo, hi};
      lo *= 2.0;
      hi *= 2.0;
    }
    throw OutOfRange("could not bracket quantile level " + std::to_string(level));
  }

  DiffusionSpec spec_;
  double log_g_;
  std::vector<LawNode> nodes_;  // ascending x
  std::vector<double> left_;    // F at nodes
  std::vector<double> right_;   // 1 - F at nodes
};

}  // namespace detail

/// Closed-form law of the standard OU process: N(0, 1/2).
inline InvariantLaw ou_law() { return InvariantLaw(std::make_shared<detail::OuModel>()); }

/// Tabulates the stationary law of an arbitrary ergodic diffusion.
inline InvariantLaw build_invariant_law(const DiffusionSpec& spec, Bracket probe = {-50.0, 50.0}) {
  const auto report = check_ergodicity(spec, probe);
  if (!report.ergodic())
    throw NotErgodic("diffusion '" + spec.label + "' fails the ergodicity check (C2: " +
                     (report.c2_holds ? "ok" : "fails") + ", C3: " +
                     (report.c3_holds ? "ok" : "fails") + ")");

  // March until the density is negligible, however far that is.
  constexpr double kFar = 1e6;
  auto lm = detail::march_log_density(spec, -kFar);
  auto rm = detail::march_log_density(spec, kFar);
  if (lm.hit_limit || rm.hit_limit)
    throw NotErgodic("stationary density of '" + spec.label + "' does not decay");

  std::vector<detail::LawNode> nodes(lm.nodes.rbegin(), lm.nodes.rend());
  std::vector<double> cells(lm.cell_log_mass.rbegin(), lm.cell_log_mass.rend());
  nodes.insert(nodes.end(), rm.nodes.begin() + 1, rm.nodes.end());
  cells.insert(cells.end(), rm.cell_log_mass.begin(), rm.cell_log_mass.end());

  double log_g = -kInf;
  for (double v : cells) log_g = detail::log_sum_exp(log_g, v);

  const std::size_t n = nodes.size();
  std::vector<double> left(n, 0.0);
  std::vector<double> right(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) left[k + 1] = left[k] + std::exp(cells[k] - log_g);
  for (std::size_t k = n - 1; k > 0; --k) right[k - 1] = right[k] + std::exp(cells[k - 1] - log_g);

  return InvariantLaw(std::make_shared<detail::NumericModel>(spec, log_g, std::move(nodes),
                                                             std::move(left), std::move(right)));
}

}  // namespace sres
