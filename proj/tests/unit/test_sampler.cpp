#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "dps/error.hpp"
#include "dps/lattice.hpp"
#include "dps/rng.hpp"
#include "dps/sampler.hpp"
#include "dps/stats.hpp"
#include "oracles.hpp"

using namespace dps;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(Rng, SameSeedAndStreamReproduce) {
  RngStream a(123, 4), b(123, 4), c(123, 5);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformAndBelowRanges) {
  RngStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double v = rng.uniform_open();
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
    EXPECT_LT(rng.below(7), 7u);
  }
}

TEST(SampleNormal, MomentsOverMillionDraws) {
  RngStream rng(2024);
  const double sigma = 1.7;
  const int draws = 1000000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = sample_normal(sigma, 1, rng)(0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / draws;
  const double var = s2 / draws - mean * mean;
  EXPECT_LT(std::abs(mean), 4.0 * sigma / std::sqrt(double(draws)));
  EXPECT_NEAR(var, sigma * sigma, 0.01 * sigma * sigma);
}

TEST(SampleNormal, Deterministic) {
  RngStream a(77, 1), b(77, 1);
  EXPECT_EQ(sample_normal(2.0, 5, a), sample_normal(2.0, 5, b));
}

TEST(SampleNormal, KolmogorovSmirnov) {
  RngStream rng(8);
  std::vector<double> xs(50000);
  for (auto& x : xs) x = sample_normal(0.6, 1, rng)(0);
  EXPECT_GT(ks_normal(xs, 0.6).p_value, 0.001);
}

TEST(DiscreteGaussian, ConcentratedLatticeAlwaysZero) {
  const DiscreteGaussianSampler sampler(DiscreteGaussianSpec{Lattice::standard("Z1").scaled(10.0), vec({0.0}), 1.0});
  RngStream rng(5);
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) zeros += sampler.sample(rng)(0) == 0.0;
  EXPECT_EQ(zeros, 100000);
}

TEST(DiscreteGaussian, HalfShiftedIntegers) {
  double total = 0.0;
  for (int k = -40; k <= 40; ++k) total += std::exp(-(k + 0.5) * (k + 0.5) / 2.0);
  const double p_half = std::exp(-0.125) / total;
  EXPECT_NEAR(p_half, 0.35207, 1e-5);

  const DiscreteGaussianSampler sampler(DiscreteGaussianSpec{Lattice::standard("Z1"), vec({0.5}), 1.0});
  RngStream rng(6);
  const int draws = 100000;
  int plus = 0, minus = 0;
  for (int i = 0; i < draws; ++i) {
    const double x = sampler.sample(rng)(0);
    plus += std::abs(x - 0.5) < 1e-12;
    minus += std::abs(x + 0.5) < 1e-12;
  }
  const CIEstimate cp = proportion_ci(plus, draws);
  const CIEstimate cm = proportion_ci(minus, draws);
  EXPECT_LE(cp.lo, p_half);
  EXPECT_GE(cp.hi, p_half);
  EXPECT_LE(cm.lo, p_half);
  EXPECT_GE(cm.hi, p_half);
}

TEST(DiscreteGaussian, IntegerPmfChiSquare) {
  constexpr int kmax = 10;
  std::vector<double> expected(2 * kmax + 1);
  double total = 0.0;
  for (int k = -kmax; k <= kmax; ++k) total += std::exp(-0.5 * k * k);
  for (int k = -kmax; k <= kmax; ++k) expected[k + kmax] = std::exp(-0.5 * k * k) / total;

  const DiscreteGaussianSampler sampler(DiscreteGaussianSpec{Lattice::standard("Z1"), vec({0.0}), 1.0});
  RngStream rng(99);
  std::vector<std::uint64_t> observed(2 * kmax + 1, 0);
  for (int i = 0; i < 1000000; ++i) {
    const auto k = static_cast<int>(std::lround(sampler.sample(rng)(0)));
    ASSERT_LE(std::abs(k), kmax);
    ++observed[k + kmax];
  }
  EXPECT_GT(chi_square_gof(observed, expected).p_value, 0.001);
}

TEST(DiscreteGaussian, HexagonalPmfChiSquare) {
  const Lattice a2 = Lattice::standard("A2");
  const Vector t = vec({0.3, -0.2});
  const double sigma = 0.8;
  constexpr int kmax = 8;
  std::map<std::pair<int, int>, std::size_t> index;
  std::vector<double> expected;
  double total = 0.0;
  for (int i = -kmax; i <= kmax; ++i) {
    for (int j = -kmax; j <= kmax; ++j) {
      const Vector x = a2.basis() * vec({double(i), double(j)}) + t;
      index[{i, j}] = expected.size();
      expected.push_back(std::exp(-x.squaredNorm() / (2.0 * sigma * sigma)));
      total += expected.back();
    }
  }
  for (auto& e : expected) e /= total;

  const DiscreteGaussianSampler sampler(DiscreteGaussianSpec{a2, t, sigma});
  RngStream rng(12);
  std::vector<std::uint64_t> observed(expected.size(), 0);
  for (int s = 0; s < 200000; ++s) {
    const Vector x = sampler.sample(rng);
    const IntVector c = a2.coords_of(x - t);
    ASSERT_TRUE(a2.contains(x - t));
    const auto it = index.find({static_cast<int>(c(0)), static_cast<int>(c(1))});
    ASSERT_NE(it, index.end());
    ++observed[it->second];
  }
  EXPECT_GT(chi_square_gof(observed, expected).p_value, 0.001);
}

TEST(DiscreteGaussian, OneShotMatchesSupport) {
  RngStream rng(3);
  const DiscreteGaussianSpec spec{Lattice::standard("D4"), Vector::Constant(4, 0.25), 1.2};
  const Vector x = sample_discrete_gaussian(spec, rng);
  EXPECT_TRUE(spec.lattice.contains(x - spec.shift));
}

TEST(ContinuousDither, ReducedLiesInCellAndSameCoset) {
  const Lattice lat = Lattice::standard("A2").scaled(1.5);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RngStream a(seed), b(seed);
    const Vector t = sample_dither_continuous(2.0, 2, a);
    const Vector r = sample_dither_continuous(2.0, 2, b, &lat);
    EXPECT_TRUE(lat.contains(t - r));
    EXPECT_EQ(closest_point(lat, r).coords, IntVector::Zero(2));
  }
}

TEST(DiscreteDither, TwoZOverZCosets) {
  const double sigma = 2.0;
  double even = 0.0, total = 0.0;
  for (int k = -60; k <= 60; ++k) {
    const double w = std::exp(-double(k) * k / (2.0 * sigma * sigma));
    total += w;
    if (k % 2 == 0) even += w;
  }
  const DiscreteDither dither(Lattice::standard("Z1").scaled(2.0), Lattice::standard("Z1"), sigma);
  RngStream rng(21);
  std::vector<std::uint64_t> observed(2, 0);
  for (int i = 0; i < 100000; ++i) {
    const double t = dither.sample(rng)(0);
    ASSERT_TRUE(t == 0.0 || t == 1.0) << t;
    ++observed[t == 1.0];
  }
  EXPECT_GT(chi_square_gof(observed, {even / total, 1.0 - even / total}).p_value, 0.001);
}

TEST(DiscreteDither, EqualLatticesGiveZero) {
  const Lattice d4 = Lattice::standard("D4");
  RngStream rng(4);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(sample_dither_discrete(d4, d4, 1.5, rng).norm(), 1e-9);
}

TEST(DiscreteDither, HalfIntegerRefinementHasFourCosets) {
  const double sigma = 0.7;
  double even = 0.0, total = 0.0;
  for (int m = -80; m <= 80; ++m) {
    const double w = std::exp(-(m / 2.0) * (m / 2.0) / (2.0 * sigma * sigma));
    total += w;
    if (m % 2 == 0) even += w;
  }
  const double p0 = even / total;
  const std::vector<double> expected = {p0 * p0, p0 * (1 - p0), (1 - p0) * p0, (1 - p0) * (1 - p0)};
  const DiscreteDither dither(Lattice::standard("Z2"), Lattice::standard("Z2").scaled(0.5), sigma);
  RngStream rng(22);
  std::vector<std::uint64_t> observed(4, 0);
  for (int i = 0; i < 100000; ++i) {
    const Vector t = dither.sample(rng);
    for (int j = 0; j < 2; ++j) ASSERT_TRUE(t(j) == 0.0 || t(j) == 0.5);
    ++observed[2 * (t(0) == 0.5) + (t(1) == 0.5)];
  }
  EXPECT_GT(chi_square_gof(observed, expected).p_value, 0.001);
}

TEST(DiscreteDither, RequiresNesting) {
  try {
    DiscreteDither(Lattice::standard("Z1"), Lattice::standard("Z1").scaled(2.0), 1.0);
    FAIL() << "expected NotNested";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNested);
  }
}
