#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sresonance/map_test.hpp"

using namespace sres;

namespace {

TestProblem standard(double eps = 0.7, double T = 100.0) {
  return {0.0, 0.5, 0.5, 0.5, 1.0, eps, T, ou_law(), Scheme::time};
}

double posterior_gap(const GaussianMoments& m, double p0, double p1, double x) {
  auto phi = [](double x, double mu, double s2) {
    return std::exp(-0.5 * (x - mu) * (x - mu) / s2) / std::sqrt(2.0 * M_PI * s2);
  };
  return p1 * phi(x, m.mu1, m.s1sq) - p0 * phi(x, m.mu0, m.s0sq);
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  for (int i = 0; lo + i * step <= hi + 1e-9; ++i) v.push_back(lo + i * step);
  return v;
}

}  // namespace

TEST(TestProblem, Validation) {
  auto p = standard();
  p.p0 = 1.0;
  p.p1 = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = standard();
  p.p1 = 0.6;
  EXPECT_THROW(p.validate(), ConfigError);
  p = standard();
  p.theta1 = 1.2;
  EXPECT_THROW(p.validate(), ConfigError);
  p = standard();
  p.theta0 = 0.7;
  EXPECT_THROW(p.validate(), ConfigError);
  p = standard();
  p.T = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Moments, IdenticalHypotheses) {
  auto p = standard();
  p.theta1 = p.theta0;
  const auto m = moments(p);
  EXPECT_EQ(m.mu0, m.mu1);
  EXPECT_EQ(m.s0sq, m.s1sq);
}

TEST(Moments, TimeSchemeDefinitions) {
  const auto p = standard();
  const auto m = moments(p);
  EXPECT_GT(m.mu0, 0.0);
  EXPECT_LT(m.mu0, 1.0);
  EXPECT_GT(m.mu1, 0.0);
  EXPECT_LT(m.mu1, 1.0);
  EXPECT_NEAR(m.mu1, 1.0 - oracle::ou_cdf(0.5 / 0.7), 1e-14);
  EXPECT_NEAR(m.s1sq, edf_variance(0.5 / 0.7, ou_law()) / 100.0, 1e-15);
  EXPECT_GT(m.s1sq, m.s0sq);
}

TEST(Moments, VarianceNonDecreasingInTheta) {
  const ChannelConfig ch{1.0, 0.7, ou_law()};
  double prev = 0.0;
  for (double th = 0.0; th < 1.0; th += 0.05) {
    const double v = edf_variance(ch.gap(th), ch.law);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Moments, EnergySchemeDefinitions) {
  auto p = standard();
  p.scheme = Scheme::energy;
  const auto m = moments(p);
  const ChannelConfig ch{1.0, 0.7, ou_law()};
  EXPECT_DOUBLE_EQ(m.mu0, nu_of_theta(0.0, ch));
  EXPECT_DOUBLE_EQ(m.s1sq, energy_variance(0.5, ch) / 100.0);
  EXPECT_GT(m.mu1, m.mu0);
}

TEST(BuildRule, CaseThreeWithEqualPriors) {
  const GaussianMoments m{0.2, 0.4, 0.01, 0.01};
  const auto r = build_rule(m, 0.5, 0.5);
  EXPECT_EQ(r.case_id, 3);
  EXPECT_NEAR(r.gamma_single, 0.3, 1e-15);
  EXPECT_TRUE(std::isnan(r.gamma_lo));
  EXPECT_TRUE(std::isnan(r.gamma_hi));
  EXPECT_TRUE(std::isnan(r.delta));
}

TEST(BuildRule, CaseThreeWithUnequalPriors) {
  const GaussianMoments m{0.2, 0.4, 0.01, 0.01};
  const auto r = build_rule(m, 0.7, 0.3);
  // Posteriors cross at gamma.
  EXPECT_NEAR(posterior_gap(m, 0.7, 0.3, r.gamma_single), 0.0, 1e-12);
  EXPECT_NEAR(r.gamma_single, (0.4 * 0.4 - 0.2 * 0.2 + 2 * 0.01 * std::log(0.7 / 0.3)) / (2 * 0.2), 1e-15);
}

TEST(BuildRule, CaseOneNegativeDeltaAcceptsAlways) {
  // s0 > s1 with nearly equal means and a heavy prior on H0.
  const GaussianMoments m{0.5, 0.5001, 0.04, 0.01};
  const auto r = build_rule(m, 0.9, 0.1);
  EXPECT_EQ(r.case_id, 1);
  EXPECT_LT(r.delta, 0.0);
  EXPECT_TRUE(r.constant());
  for (double x : {-5.0, 0.0, 0.5, 0.7, 9.0}) EXPECT_EQ(decide(r, x), Decision::D0);
  EXPECT_EQ(p_err(r).p_err, 0.1);
  EXPECT_EQ(r.accept_h0_region(), "always");
}

TEST(BuildRule, CaseTwoThresholdsEqualisePosteriors) {
  const auto p = standard();
  const auto r = build_rule(p);
  ASSERT_EQ(r.case_id, 2);
  ASSERT_GT(r.delta, 0.0);
  ASSERT_LT(r.gamma_lo, r.gamma_hi);
  const auto& m = r.moments;
  auto gap = [&](double x) { return posterior_gap(m, 0.5, 0.5, x); };
  // Bracket each crossing on either side of the H0 mode.
  const double lo = oracle::bisect(gap, m.mu0 - 40 * std::sqrt(m.s0sq), m.mu0, 1e-16);
  const double hi = oracle::bisect(gap, m.mu0, m.mu0 + 40 * std::sqrt(m.s0sq), 1e-16);
  EXPECT_NEAR(r.gamma_lo, lo, 1e-9);
  EXPECT_NEAR(r.gamma_hi, hi, 1e-9);
  EXPECT_NEAR(log_posterior_ratio(m, 0.5, 0.5, r.gamma_lo), 0.0, 1e-9);
  EXPECT_NEAR(log_posterior_ratio(m, 0.5, 0.5, r.gamma_hi), 0.0, 1e-9);
}

TEST(BuildRule, CaseOnePositiveDelta) {
  const GaussianMoments m{0.5, 0.3, 0.04, 0.01};
  const auto r = build_rule(m, 0.5, 0.5);
  ASSERT_EQ(r.case_id, 1);
  ASSERT_GT(r.delta, 0.0);
  EXPECT_LT(r.gamma_lo, r.gamma_hi);
  EXPECT_NEAR(posterior_gap(m, 0.5, 0.5, r.gamma_lo), 0.0, 1e-12);
  EXPECT_NEAR(posterior_gap(m, 0.5, 0.5, r.gamma_hi), 0.0, 1e-12);
  EXPECT_EQ(decide(r, 0.3), Decision::D1);
  EXPECT_EQ(decide(r, 2.0), Decision::D0);
}

TEST(Decide, Examples) {
  const auto r3 = build_rule(GaussianMoments{0.2, 0.4, 0.01, 0.01}, 0.5, 0.5);
  EXPECT_EQ(decide(r3, 0.25), Decision::D0);
  EXPECT_EQ(decide(r3, 0.35), Decision::D1);
  const auto r2 = build_rule(standard());
  EXPECT_EQ(decide(r2, 0.5 * (r2.gamma_lo + r2.gamma_hi)), Decision::D0);
  EXPECT_EQ(decide(r2, r2.gamma_hi + 0.01), Decision::D1);
}

TEST(Decide, AgreesWithPosteriorRatio) {
  std::mt19937_64 rng(99);
  for (double eps : {0.3, 0.7, 1.5})
    for (double p0 : {0.2, 0.5, 0.8}) {
      auto p = standard(eps);
      p.p0 = p0;
      p.p1 = 1.0 - p0;
      const auto r = build_rule(p);
      const auto& m = r.moments;
      const double spread = 6.0 * std::sqrt(std::max(m.s0sq, m.s1sq));
      std::uniform_real_distribution<double> u(std::min(m.mu0, m.mu1) - spread, std::max(m.mu0, m.mu1) + spread);
      for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        const double llr = log_posterior_ratio(m, p.p0, p.p1, x);
        if (std::abs(llr) < 1e-9) continue;
        EXPECT_EQ(decide(r, x) == Decision::D1, llr > 0.0) << x;
      }
    }
}

TEST(PErr, NearlyIdenticalHypotheses) {
  for (double p0 : {0.5, 0.3, 0.8}) {
    auto p = standard();
    p.theta1 = p.theta0 + 1e-9;
    p.p0 = p0;
    p.p1 = 1.0 - p0;
    EXPECT_NEAR(p_err(p).p_err, std::min(p0, 1.0 - p0), 1e-6) << p0;
  }
}

TEST(PErr, SymmetricCaseThreeIsNormalTail) {
  const auto r = build_rule(GaussianMoments{0.2, 0.4, 0.01, 0.01}, 0.5, 0.5);
  const double ref = oracle::normal_cdf(-1.0);
  EXPECT_NEAR(ref, 0.15866, 1e-5);
  EXPECT_NEAR(p_err(r).p_err, ref, 1e-12);
}

TEST(PErr, CaseOneNegativeDeltaIsP1) {
  const auto r = build_rule(GaussianMoments{0.5, 0.5001, 0.04, 0.01}, 0.9, 0.1);
  EXPECT_EQ(p_err(r).p_err, 0.1);
}

TEST(PErr, MatchesDirectIntegrationOfRule) {
  // P(D1|H0) and P(D0|H1) by brute-force integration of the decision.
  for (double eps : {0.4, 0.7, 1.2}) {
    const auto r = build_rule(standard(eps));
    const auto& m = r.moments;
    const double s0 = std::sqrt(m.s0sq), s1 = std::sqrt(m.s1sq);
    auto phi = [](double x, double mu, double s) { return std::exp(-0.5 * (x - mu) * (x - mu) / (s * s)) / (s * std::sqrt(2 * M_PI)); };
    const double lo = std::min(m.mu0 - 12 * s0, m.mu1 - 12 * s1), hi = std::max(m.mu0 + 12 * s0, m.mu1 + 12 * s1);
    const double t1 = oracle::riemann([&](double x) { return decide(r, x) == Decision::D1 ? phi(x, m.mu0, s0) : 0.0; }, lo, hi, 2'000'000);
    const double t2 = oracle::riemann([&](double x) { return decide(r, x) == Decision::D0 ? phi(x, m.mu1, s1) : 0.0; }, lo, hi, 2'000'000);
    const auto e = p_err(r);
    EXPECT_NEAR(e.p_type1, t1, 1e-5);
    EXPECT_NEAR(e.p_type2, t2, 1e-5);
    EXPECT_DOUBLE_EQ(e.p_err, 0.5 * e.p_type1 + 0.5 * e.p_type2);
  }
}

TEST(PErr, RelabelingSymmetry) {
  for (double eps : {0.3, 0.7, 2.0})
    for (double p0 : {0.5, 0.25}) {
      auto p = standard(eps);
      p.p0 = p0;
      p.p1 = 1.0 - p0;
      const auto m = moments(p);
      const double a = p_err(build_rule(m, p.p0, p.p1)).p_err;
      const GaussianMoments swapped{m.mu1, m.mu0, m.s1sq, m.s0sq};
      const double b = p_err(build_rule(swapped, p.p1, p.p0)).p_err;
      EXPECT_NEAR(a, b, 1e-12 + 1e-9 * a) << eps << " " << p0;
    }
}

TEST(PErr, FarTailsKeepRelativePrecision) {
  // Both tails are far below double epsilon; compare with a subtraction-free form.
  const auto r = build_rule(standard(0.1));
  const auto& m = r.moments;
  const double s1 = std::sqrt(m.s1sq);
  const double width = (r.gamma_hi - r.gamma_lo) / s1;
  const double z = (0.5 * (r.gamma_lo + r.gamma_hi) - m.mu1) / s1;
  const double t2 = width * std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI);
  EXPECT_NEAR(p_err(r).p_type2 / t2, 1.0, 1e-6);
  EXPECT_GT(p_err(r).p_err, 0.0);
}

TEST(Surface, BoundedByPriorGuess) {
  const auto cells = p_err_surface(standard(), range(0.05, 0.95, 0.05), range(0.05, 3.0, 0.05));
  for (const auto& c : cells) {
    ASSERT_TRUE(c.ok) << c.theta1 << " " << c.eps;
    EXPECT_GE(c.p_err, 0.0);
    EXPECT_LE(c.p_err, 0.5 + 1e-12);
  }
}

TEST(Surface, UnequalPriorsBound) {
  auto t = standard();
  t.p0 = 0.3;
  t.p1 = 0.7;
  for (const auto& c : p_err_surface(t, range(0.1, 0.9, 0.1), range(0.1, 3.0, 0.1))) EXPECT_LE(c.p_err, 0.3 + 1e-12);
}

TEST(Surface, InteriorLocalMinimumNearHalf) {
  const auto cells = p_err_surface(standard(), std::vector<double>{0.5}, range(0.05, 3.0, 0.01));
  int minima = 0;
  for (std::size_t i = 1; i + 1 < cells.size(); ++i)
    minima += cells[i].p_err < cells[i - 1].p_err && cells[i].p_err < cells[i + 1].p_err;
  EXPECT_GE(minima, 1);
}

TEST(Surface, FlagsInvalidCells) {
  const auto cells = p_err_surface(standard(), std::vector<double>{-0.1, 0.0, 0.5, 1.0}, std::vector<double>{0.7});
  EXPECT_FALSE(cells[0].ok);
  EXPECT_FALSE(cells[1].ok);
  EXPECT_TRUE(cells[2].ok);
  EXPECT_FALSE(cells[3].ok);
  EXPECT_TRUE(std::isnan(cells[3].p_err));
}

TEST(Surface, Reproducible) {
  const auto a = p_err_surface(standard(), range(0.1, 0.9, 0.2), range(0.1, 3.0, 0.1), 1);
  const auto b = p_err_surface(standard(), range(0.1, 0.9, 0.2), range(0.1, 3.0, 0.1), 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].p_err, b[i].p_err);
}

TEST(Surface, RejectsEmptyGrid) {
  EXPECT_THROW(p_err_surface(standard(), std::vector<double>{}, std::vector<double>{0.5}), ConfigError);
}

TEST(PerrMinimum, InteriorMinimumBelowEndpoints) {
  const auto m = find_perr_minimum(standard(), {0.05, 3.0});
  const auto ref = oracle::scan([](double e) { return -p_err(standard(e)).p_err; }, 0.05, 3.0, 2950);
  ASSERT_FALSE(m.local_minima.empty());
  ASSERT_FALSE(ref.local_maxima.empty());
  EXPECT_NEAR(m.local_minima.front().x, ref.local_maxima.front(), 2e-3);
  EXPECT_GE(m.p_err_min, 0.0);
  EXPECT_LT(m.p_err_min, std::min(m.p_err_lo, m.p_err_hi));
  EXPECT_GT(m.eps_star, 0.05);
  EXPECT_LT(m.eps_star, 3.0);
}

TEST(PerrMinimum, LongerHorizonLowersMinimum) {
  const auto a = find_perr_minimum(standard(0.7, 50.0), {0.05, 3.0});
  const auto b = find_perr_minimum(standard(0.7, 500.0), {0.05, 3.0});
  EXPECT_LT(b.p_err_min, a.p_err_min);
}

TEST(PerrMinimum, LongerHorizonLowersInteriorMinimum) {
  const auto a = find_perr_minimum(standard(0.7, 100.0), {0.05, 3.0});
  const auto b = find_perr_minimum(standard(0.7, 500.0), {0.05, 3.0});
  ASSERT_FALSE(a.local_minima.empty());
  ASSERT_FALSE(b.local_minima.empty());
  EXPECT_LT(b.local_minima.front().value, a.local_minima.front().value);
}
