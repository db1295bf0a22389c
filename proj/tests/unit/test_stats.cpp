#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "dps/error.hpp"
#include "dps/rng.hpp"
#include "dps/stats.hpp"

using namespace dps;

TEST(ProportionCi, EdgeCases) {
  const CIEstimate zero = proportion_ci(0, 100);
  EXPECT_EQ(zero.lo, 0.0);
  EXPECT_NEAR(zero.hi, 1.0 - std::pow(0.005, 1.0 / 100.0), 1e-12);
  const CIEstimate all = proportion_ci(100, 100);
  EXPECT_EQ(all.hi, 1.0);
  EXPECT_NEAR(all.lo, std::pow(0.005, 1.0 / 100.0), 1e-12);
  EXPECT_THROW(proportion_ci(5, 4), Error);
  EXPECT_THROW(proportion_ci(0, 0), Error);
}

TEST(ProportionCi, CoverageAtNinetyNinePercent) {
  RngStream rng(1);
  const double p = 0.3;
  int covered = 0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    std::uint64_t k = 0;
    for (int i = 0; i < 200; ++i) k += rng.uniform() < p;
    const CIEstimate ci = proportion_ci(k, 200);
    covered += ci.lo <= p && p <= ci.hi;
  }
  EXPECT_GE(covered, static_cast<int>(0.985 * reps));
}

TEST(MeanCi, KnownSample) {
  // 1..10: mean 5.5, sample variance 55/6
  double s = 0.0, s2 = 0.0;
  for (int i = 1; i <= 10; ++i) {
    s += i;
    s2 += double(i) * i;
  }
  const CIEstimate ci = mean_ci(s, s2, 10);
  EXPECT_NEAR(ci.p_hat, 5.5, 1e-15);
  const double half = normal_quantile(0.995) * std::sqrt(55.0 / 6.0 / 10.0);
  EXPECT_NEAR(ci.hi - ci.p_hat, half, 1e-12);
  EXPECT_NEAR(ci.p_hat - ci.lo, half, 1e-12);
}

TEST(Normal, TailAndQuantile) {
  EXPECT_NEAR(normal_q(0.0), 0.5, 1e-16);
  EXPECT_NEAR(normal_q(1.0), 0.15865525393145707, 1e-15);
  EXPECT_NEAR(normal_cdf(-1.0), normal_q(1.0), 1e-16);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
}

TEST(ChiSquare, SurvivalAndQuantile) {
  const boost::math::chi_squared_distribution<> d(7.0);
  EXPECT_NEAR(chi_square_sf(9.0, 7.0), boost::math::cdf(boost::math::complement(d, 9.0)), 1e-14);
  EXPECT_NEAR(chi_square_quantile(0.9, 7.0), boost::math::quantile(d, 0.9), 1e-10);
}

TEST(ChiSquare, GoodnessOfFitDetectsMismatch) {
  RngStream rng(2);
  std::vector<std::uint64_t> fair(6, 0), loaded(6, 0);
  for (int i = 0; i < 60000; ++i) {
    ++fair[rng.below(6)];
    const double u = rng.uniform();
    ++loaded[u < 0.2 ? 0 : 1 + rng.below(5)];
  }
  const std::vector<double> uniform(6, 1.0 / 6.0);
  EXPECT_GT(chi_square_gof(fair, uniform).p_value, 0.001);
  EXPECT_LT(chi_square_gof(loaded, uniform).p_value, 1e-10);
}

TEST(ChiSquare, PoolsSparseCells) {
  std::vector<std::uint64_t> observed = {500, 490, 8, 2, 0};
  const std::vector<double> expected = {0.5, 0.49, 0.008, 0.0019, 0.0001};
  const TestResult r = chi_square_gof(observed, expected);
  EXPECT_GT(r.p_value, 0.01);
}

TEST(KolmogorovSmirnov, AcceptsNormalRejectsUniform) {
  RngStream rng(3);
  std::vector<double> normal(20000), uniform(20000);
  for (auto& x : normal) x = 2.0 * rng.normal();
  for (auto& x : uniform) x = 4.0 * (rng.uniform() - 0.5);
  EXPECT_GT(ks_normal(normal, 2.0).p_value, 0.001);
  EXPECT_LT(ks_normal(uniform, 2.0).p_value, 1e-6);
  EXPECT_NEAR(kolmogorov_sf(0.0), 1.0, 1e-15);
  EXPECT_NEAR(kolmogorov_sf(1.3580986), 0.05, 1e-6);
}

TEST(QuantileBracket, CoversMedian) {
  const QuantileBracket b = quantile_bracket(1001, 0.5);
  EXPECT_LT(b.lo_index, 500);
  EXPECT_GT(b.hi_index, 500);
  EXPECT_LE(b.hi_index - 500, 45);
  EXPECT_LE(500 - b.lo_index, 45);
}

TEST(QuantileBracket, EmpiricalCoverage) {
  RngStream rng(4);
  int covered = 0;
  const int reps = 1000;
  const double q = 0.9;
  const double truth = normal_quantile(q);
  for (int r = 0; r < reps; ++r) {
    std::vector<double> xs(500);
    for (auto& x : xs) x = rng.normal();
    std::sort(xs.begin(), xs.end());
    const QuantileBracket b = quantile_bracket(xs.size(), q);
    if (b.lo_index >= 0 && b.hi_index < 500) covered += xs[b.lo_index] <= truth && truth <= xs[b.hi_index];
  }
  EXPECT_GE(covered, static_cast<int>(0.98 * reps));
}
