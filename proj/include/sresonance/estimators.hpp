#pragma once

// Signal estimators for the two observation schemes and their asymptotic
// variances.
//
// Time scheme: Gamma_T -> pi(theta) = 1 - F(a), a = (tau - theta) / eps, with
// estimator theta_hat = tau - eps F^-1(1 - Gamma_T) and delta-method variance
// Sigma(theta) = eps^2 V(a) / f(a)^2, V the asymptotic variance of the EDF.
//
// Energy scheme: nu_T -> nu(theta) = E[(eps xi + theta)^2 1{xi > a}], inverted
// numerically, with variance Sigma~(theta) = V~(theta) / nu'(theta)^2 where
// V~ = 4 E[M(xi)^2 / (sigma(xi) f(xi))^2].

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "sresonance/errors.hpp"
#include "sresonance/invariant_law.hpp"
#include "sresonance/numerics.hpp"

namespace sres {

enum class Scheme { time, energy };

inline const char* to_string(Scheme s) { return s == Scheme::time ? "time" : "energy"; }

inline Scheme parse_scheme(const std::string& s) {
  if (s == "time") return Scheme::time;
  if (s == "energy") return Scheme::energy;
  throw ConfigError("unknown scheme '" + s + "' (expected time or energy)");
}

struct ChannelConfig {
  double tau;
  double eps;
  InvariantLaw law;

  void validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("noise level eps must be positive");
    if (!std::isfinite(tau)) throw ConfigError("threshold tau must be finite");
  }
  /// Threshold gap in noise units, (tau - theta) / eps.
  double gap(double theta) const { return (tau - theta) / eps; }
};

struct VarianceReport {
  double value;   ///< asymptotic variance of the estimator
  double fisher;  ///< 1 / value
  Scheme scheme;
};

namespace detail {

inline QuadratureConfig estimator_quadrature() { return {1e-10, 0.0, 6000}; }

// Inner integrals of nested quadratures must be resolved well below the outer
// tolerance, or their noise stalls the outer refinement.
inline QuadratureConfig inner_quadrature() { return {1e-13, 1e-16, 6000}; }

inline std::array<double, 4> law_breakpoints(const InvariantLaw& law, double x) {
  const Bracket s = law.support();
  return {x, s.lo, s.hi, 0.0};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Time-over-threshold scheme.

/// pi(theta) = 1 - F((tau - theta) / eps), the ergodic limit of Gamma_T.
inline double pi_of_theta(double theta, const ChannelConfig& ch) {
  ch.validate();
  return ch.law.sf(ch.gap(theta));
}

/// theta_hat = tau - eps F^-1(1 - Gamma_T).
inline double estimate_theta_time(double gamma_T, const ChannelConfig& ch) {
  ch.validate();
  if (gamma_T == 0.0 || gamma_T == 1.0)
    throw DegenerateObservation("time fraction over threshold is " + std::to_string(gamma_T) +
                                "; the estimator diverges");
  if (!(gamma_T > 0.0 && gamma_T < 1.0))
    throw OutOfRange("time fraction must lie in (0, 1)");
  return ch.tau - ch.eps * ch.law.inverse_sf(gamma_T);
}

/// Asymptotic variance V(x) of the empirical distribution function at x,
///
///   V(x) = 4 E[ (F(xi ^ x) (1 - F(xi v x)) / (sigma(xi) f(xi)))^2 ],
///
/// the inverse of the Fisher-information analogue for estimating F(x).
template <class Sigma>
double edf_variance(double x, const InvariantLaw& law, const Sigma& sigma_fn) {
  auto integrand = [&](double xi) {
    const double f = law.pdf(xi);
    if (!(f > 0.0)) return 0.0;
    const double p = xi < x ? law.cdf(xi) * law.sf(x) : law.cdf(x) * law.sf(xi);
    if (p == 0.0) return 0.0;
    const double s = sigma_fn(xi);
    // p * (p / f) keeps the pieces representable in the far tails.
    return p * (p / (s * s * f));
  };
  const auto bp = detail::law_breakpoints(law, x);
  return 4.0 * integrate(integrand, -kInf, kInf, detail::estimator_quadrature(), bp);
}

inline double edf_variance(double x, const InvariantLaw& law) {
  return edf_variance(x, law, [&law](double u) { return law.diffusion(u); });
}

/// Sigma(theta) = eps^2 V(a) / f(a)^2 with a = (tau - theta) / eps. Throws
/// NonFinite when the density at the threshold gap underflows.
inline VarianceReport sigma_time(double theta, const ChannelConfig& ch) {
  ch.validate();
  const double a = ch.gap(theta);
  const double fa = ch.law.pdf(a);
  if (!(fa > 0.0))
    throw NonFinite("stationary density vanishes at the threshold gap a = " + std::to_string(a));
  const double v = edf_variance(a, ch.law);
  const double value = ch.eps * ch.eps * (v / fa) / fa;
  if (!(value > 0.0) || !std::isfinite(value))
    throw NonFinite("time-scheme variance is not finite at a = " + std::to_string(a));
  return {value, 1.0 / value, Scheme::time};
}

/// The closed-form OU variance as printed for the standard OU noise,
///
///   eps^2 pi^{3/2} e^{2a^2} int (1 + erf(x ^ a))^2 (1 - erf(x v a))^2 e^{x^2} dx.
///
/// It equals 4 Sigma(theta) from the generic pipeline; only argmax
/// comparisons against it are meaningful.
inline double sigma_time_ou_closed_form(double theta, const ChannelConfig& ch) {
  ch.validate();
  const double a = ch.gap(theta);
  auto integrand = [a](double x) {
    const double p = std::erfc(-std::min(x, a)) * std::erfc(std::max(x, a));
    if (p == 0.0) return 0.0;
    return std::exp(2.0 * std::log(p) + x * x + 2.0 * a * a);
  };
  const std::array<double, 3> bp{a, -27.0, 27.0};
  const double integral = integrate(integrand, -kInf, kInf, detail::estimator_quadrature(), bp);
  const double value = ch.eps * ch.eps * std::pow(std::numbers::pi, 1.5) * integral;
  if (!(value > 0.0) || !std::isfinite(value))
    throw NonFinite("closed-form OU variance is not representable at a = " + std::to_string(a));
  return value;
}

/// Log of the Gaussian approximation to the likelihood of Gamma_T,
///   0.5 log T - 0.5 log(2 pi V(a)) - (T/2) (1 - Gamma_T - F(a))^2 / V(a).
inline double approx_log_likelihood_time(double theta, double gamma_T, double T,
                                         const ChannelConfig& ch) {
  ch.validate();
  if (!(gamma_T > 0.0 && gamma_T < 1.0)) throw OutOfRange("time fraction must lie in (0, 1)");
  if (!(T > 0.0)) throw ConfigError("observation horizon T must be positive");
  const double a = ch.gap(theta);
  const double v = edf_variance(a, ch.law);
  const double dev = ch.law.sf(a) - gamma_T;
  return 0.5 * std::log(T) - 0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * T * dev * dev / v;
}

/// The exponent term alone, -(T/2) (1 - Gamma_T - F(a))^2 / V(a).
inline double approx_log_likelihood_exponent_time(double theta, double gamma_T, double T,
                                                  const ChannelConfig& ch) {
  ch.validate();
  const double a = ch.gap(theta);
  const double dev = ch.law.sf(a) - gamma_T;
  if (dev == 0.0) return 0.0;
  return -0.5 * T * dev * dev / edf_variance(a, ch.law);
}

// ---------------------------------------------------------------------------
// Energy scheme.

/// Upper-tail moments int_y^inf xi^k f(xi) dxi for k = 0, 1, 2.
struct TailMoments {
  double m0;
  double m1;
  double m2;
};

/// Tail moments by quadrature; the zeroth moment is the law's survival
/// function.
inline TailMoments tail_moments_quadrature(double y, const InvariantLaw& law) {
  const auto bp = detail::law_breakpoints(law, y);
  const auto qc = detail::inner_quadrature();
  auto moment = [&](int k) {
    return integrate(
        [&](double xi) {
          const double f = law.pdf(xi);
          return f == 0.0 ? 0.0 : (k == 1 ? xi * f : xi * xi * f);
        },
        y, kInf, qc, bp);
  };
  return {law.sf(y), moment(1), moment(2)};
}

/// Exact Gaussian tail moments of the OU law N(0, 1/2).
inline TailMoments tail_moments_ou(double y) {
  const double g = std::exp(-y * y) * 0.5 * std::numbers::inv_sqrtpi;
  const double q = std::erfc(y);
  return {0.5 * q, g, y * g + 0.25 * q};
}

inline TailMoments tail_moments(double y, const InvariantLaw& law) {
  return law.kind() == LawKind::ornstein_uhlenbeck ? tail_moments_ou(y)
                                                   : tail_moments_quadrature(y, law);
}

/// nu(theta) = eps^2 E[xi^2 1{xi > a}] + theta^2 (1 - F(a)) + 2 theta eps E[xi 1{xi > a}],
/// all three expectations by quadrature over xi > a.
inline double nu_of_theta_quadrature(double theta, const ChannelConfig& ch) {
  ch.validate();
  const auto t = tail_moments_quadrature(ch.gap(theta), ch.law);
  return ch.eps * ch.eps * t.m2 + theta * theta * t.m0 + 2.0 * theta * ch.eps * t.m1;
}

/// Closed form for OU noise:
///   nu = (1/4) {(eps^2 + 2 theta^2) erfc(a) + 2 eps (theta + tau) e^{-a^2} / sqrt(pi)}.
inline double nu_of_theta_ou(double theta, const ChannelConfig& ch) {
  ch.validate();
  const double a = ch.gap(theta);
  const double e2 = ch.eps * ch.eps;
  return 0.25 * ((e2 + 2.0 * theta * theta) * std::erfc(a) +
                 2.0 * ch.eps * (theta + ch.tau) * std::exp(-a * a) * std::numbers::inv_sqrtpi);
}

/// Ergodic limit of nu_T; closed form for OU noise, quadrature otherwise.
inline double nu_of_theta(double theta, const ChannelConfig& ch) {
  return ch.law.kind() == LawKind::ornstein_uhlenbeck ? nu_of_theta_ou(theta, ch)
                                                      : nu_of_theta_quadrature(theta, ch);
}

/// nu'(theta) = (tau^2 / eps) f(a) + 2 theta (1 - F(a)) + 2 eps E[xi 1{xi > a}].
inline double nu_prime_quadrature(double theta, const ChannelConfig& ch) {
  ch.validate();
  const double a = ch.gap(theta);
  const auto t = tail_moments_quadrature(a, ch.law);
  return ch.tau * ch.tau / ch.eps * ch.law.pdf(a) + 2.0 * theta * t.m0 + 2.0 * ch.eps * t.m1;
}

/// nu'(theta) = theta erfc(a) + (eps^2 + tau^2) e^{-a^2} / (eps sqrt(pi)) for OU noise.
inline double nu_prime_ou(double theta, const ChannelConfig& ch) {
  ch.validate();
  const double a = ch.gap(theta);
  return theta * std::erfc(a) +
         (ch.eps * ch.eps + ch.tau * ch.tau) * std::exp(-a * a) * std::numbers::inv_sqrtpi / ch.eps;
}

inline double nu_prime(double theta, const ChannelConfig& ch) {
  return ch.law.kind() == LawKind::ornstein_uhlenbeck ? nu_prime_ou(theta, ch)
                                                      : nu_prime_quadrature(theta, ch);
}

/// theta~ = nu^-1(nu_T), searched on [0, tau] and then on [-tau, 2 tau].
inline double estimate_theta_energy(double nu_T, const ChannelConfig& ch) {
  ch.validate();
  if (!(ch.tau > 0.0)) throw ConfigError("energy estimator needs a positive threshold");
  if (nu_T == 0.0)
    throw DegenerateObservation("no energy observed above the threshold; the estimator diverges");
  if (!(nu_T > 0.0) || !std::isfinite(nu_T))
    throw OutOfRange("observed energy must be positive and finite");
  auto g = [&](double th) { return nu_of_theta(th, ch) - nu_T; };
  for (const Bracket b : {Bracket{0.0, ch.tau}, Bracket{-ch.tau, 2.0 * ch.tau}}) {
    const double lo = g(b.lo);
    const double hi = g(b.hi);
    if (lo <= 0.0 && hi >= 0.0) return find_root(g, b, 1e-13);
  }
  throw OutOfRange("observed energy " + std::to_string(nu_T) +
                   " is outside the range of nu(theta) on [-tau, 2 tau]");
}

/// M(y) = E[(F(y) - 1{xi < y}) (eps xi + theta)^2 1{xi > a}].
///
/// Evaluated through the equivalent forms F(y) nu for y <= a and
/// int_y^inf ((eps s + theta)^2 - nu) f(s) ds for y > a, which avoid
/// differences of nearly equal tail masses.
inline double m_kernel(double y, double theta, const ChannelConfig& ch, double nu) {
  const double a = ch.gap(theta);
  if (y <= a) return ch.law.cdf(y) * nu;
  const auto t = tail_moments(y, ch.law);
  return ch.eps * ch.eps * t.m2 + 2.0 * ch.eps * theta * t.m1 + (theta * theta - nu) * t.m0;
}

inline double m_kernel(double y, double theta, const ChannelConfig& ch) {
  ch.validate();
  return m_kernel(y, theta, ch, nu_of_theta(theta, ch));
}

/// V~(theta) = 4 E[M(xi)^2 / (sigma(xi) f(xi))^2], the asymptotic variance of nu_T.
inline double energy_variance(double theta, const ChannelConfig& ch) {
  ch.validate();
  const double nu = nu_of_theta(theta, ch);
  auto integrand = [&](double xi) {
    const double f = ch.law.pdf(xi);
    if (!(f > 0.0)) return 0.0;
    const double m = m_kernel(xi, theta, ch, nu);
    if (m == 0.0) return 0.0;
    const double s = ch.law.diffusion(xi);
    return m * (m / (s * s * f));
  };
  const auto bp = detail::law_breakpoints(ch.law, ch.gap(theta));
  return 4.0 * integrate(integrand, -kInf, kInf, detail::estimator_quadrature(), bp);
}

/// Sigma~(theta) = V~(theta) / nu'(theta)^2.
inline VarianceReport sigma_energy(double theta, const ChannelConfig& ch) {
  ch.validate();
  const double d = nu_prime(theta, ch);
  if (!(d > 0.0))
    throw NonFinite("nu'(theta) vanishes at a = " + std::to_string(ch.gap(theta)));
  const double v = energy_variance(theta, ch);
  const double value = (v / d) / d;
  if (!(value > 0.0) || !std::isfinite(value))
    throw NonFinite("energy-scheme variance is not finite at a = " + std::to_string(ch.gap(theta)));
  return {value, 1.0 / value, Scheme::energy};
}

inline VarianceReport asymptotic_variance(double theta, const ChannelConfig& ch, Scheme scheme) {
  return scheme == Scheme::time ? sigma_time(theta, ch) : sigma_energy(theta, ch);
}

}  // namespace sres
