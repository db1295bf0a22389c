#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "dps/error.hpp"
#include "dps/gaussian_measures.hpp"
#include "dps/lattice.hpp"
#include "dps/rng.hpp"
#include "oracles.hpp"

using namespace dps;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// sum of f_sigma(B c + t) over a coordinate box large enough for the given sigma.
double brute_mass(const Lattice& lat, const Vector& t, double sigma, int half_width) {
  const int n = lat.dim();
  Eigen::VectorXi lo = Eigen::VectorXi::Constant(n, -half_width);
  Eigen::VectorXi hi = Eigen::VectorXi::Constant(n, half_width);
  const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.5 * n);
  double s = 0.0;
  oracle::for_each_in_box(lo, hi, [&](const Eigen::VectorXi& c) {
    const Vector x = lat.basis() * c.cast<double>() + t;
    s += norm * std::exp(-x.squaredNorm() / (2.0 * sigma * sigma));
  });
  return s;
}

double brute_entropy(const Lattice& lat, const Vector& t, double sigma, int half_width) {
  const int n = lat.dim();
  Eigen::VectorXi lo = Eigen::VectorXi::Constant(n, -half_width);
  Eigen::VectorXi hi = Eigen::VectorXi::Constant(n, half_width);
  std::vector<double> w;
  oracle::for_each_in_box(lo, hi, [&](const Eigen::VectorXi& c) {
    const Vector x = lat.basis() * c.cast<double>() + t;
    w.push_back(std::exp(-x.squaredNorm() / (2.0 * sigma * sigma)));
  });
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double h = 0.0;
  for (double v : w) {
    const double p = v / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// Root of 2 sum_{k >= 1} exp(-s^2 k^2 / 2) = eps by bisection.
double smoothing_z_oracle(double eps) {
  auto g = [](double s) {
    double v = 0.0;
    for (int k = 1; k < 100; ++k) v += 2.0 * std::exp(-s * s * k * k / 2.0);
    return v;
  };
  double lo = 0.1, hi = 20.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > eps ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(GaussianPdf, Examples) {
  EXPECT_NEAR(gaussian_pdf(1.0, vec({0.0})), 1.0 / std::sqrt(2.0 * kPi), 1e-15);
  EXPECT_NEAR(gaussian_pdf(1.0, vec({0.0})), 0.3989423, 1e-7);
  EXPECT_NEAR(gaussian_pdf(2.0, vec({0.0, 0.0})), 1.0 / (8.0 * kPi), 1e-15);
  EXPECT_NEAR(gaussian_pdf(2.0, vec({0.0, 0.0})), 0.0397887, 1e-7);
}

TEST(GaussianPdf, ScalingIdentity) {
  RngStream rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = 3.0 * rng.normal();
    const double sigma = 0.2 + 3.0 * rng.uniform();
    EXPECT_NEAR(gaussian_pdf(sigma, x), std::pow(sigma, -3) * gaussian_pdf(1.0, x / sigma),
                1e-12 * gaussian_pdf(sigma, x) + 1e-300);
  }
}

TEST(GaussianPdf, RejectsNonPositiveSigma) {
  EXPECT_THROW(gaussian_pdf(0.0, vec({0.0})), Error);
}

TEST(GaussianMass, IntegerLatticeAtUnitSigma) {
  const ThetaSum s = gaussian_mass(Lattice::standard("Z1"), vec({0.0}), 1.0);
  EXPECT_NEAR(s.value, oracle::theta1(1.0, 0.0, 1.0), 1e-14);
  EXPECT_NEAR(s.value - 1.0, 2.0 * std::exp(-2.0 * kPi * kPi), 1e-13);
  EXPECT_NEAR(s.value - 1.0, 5.35e-9, 0.01e-9);
  EXPECT_LE(s.tail_bound, kDefaultThetaTol);
  EXPECT_NEAR(s.log_value, std::log(s.value), 1e-14);
}

TEST(GaussianMass, IntegerLatticeAtInverseRootTwo) {
  const double sigma = 1.0 / std::sqrt(2.0);
  double direct = 0.0;
  for (int k = -30; k <= 30; ++k) direct += std::exp(-double(k) * k) / std::sqrt(kPi);
  const ThetaSum s = gaussian_mass(Lattice::standard("Z1"), vec({0.0}), sigma);
  EXPECT_NEAR(s.value, direct, 1e-13);
  EXPECT_NEAR(s.value, 1.000103, 1e-6);
}

TEST(GaussianMass, ShiftedCosetsAgainstDirectSums) {
  const Lattice a2 = Lattice::standard("A2");
  for (double sigma : {0.3, 0.7, 1.5}) {
    const Vector t = vec({0.23, -0.41});
    EXPECT_NEAR(gaussian_mass(a2, t, sigma).value, brute_mass(a2, t, sigma, 40),
                1e-11 * brute_mass(a2, t, sigma, 40));
  }
  const Lattice d4 = Lattice::standard("D4");
  const Vector t4 = vec({0.1, -0.2, 0.35, 0.05});
  const double ref = brute_mass(d4, t4, 0.8, 8);
  EXPECT_NEAR(gaussian_mass(d4, t4, 0.8).value, ref, 1e-11 * ref);
  const Lattice e8 = Lattice::standard("E8");
  const ThetaSum fast = gaussian_mass(e8, Vector::Constant(8, 0.1), 0.6);
  const ThetaSum generic = gaussian_mass(new_lattice(e8.basis()), Vector::Constant(8, 0.1), 0.6);
  EXPECT_NEAR(fast.value, generic.value, 1e-10 * generic.value);
}

TEST(GaussianMass, ShiftInvariance) {
  for (const char* name : {"Z2", "A2", "D4", "E8"}) {
    const Lattice lat = Lattice::standard(name);
    Vector t = Vector::Constant(lat.dim(), 0.3);
    IntVector c = IntVector::Constant(lat.dim(), 2);
    c(0) = -3;
    const double a = gaussian_mass(lat, t, 0.9).value;
    const double b = gaussian_mass(lat, t + lat.embed(c), 0.9).value;
    EXPECT_NEAR(a, b, 1e-11 * a) << name;
  }
}

TEST(GaussianMass, PoissonSummation) {
  // V f_sigma(Lambda) = sum over the dual of exp(-2 pi^2 sigma^2 |y|^2)
  for (const char* name : {"Z1", "A2", "D4", "E8"}) {
    const Lattice lat = Lattice::standard(name);
    for (double sigma : {0.4, 0.6, 1.0}) {
      const double lhs = lat.volume() * gaussian_mass(lat, Vector::Zero(lat.dim()), sigma).value;
      const double rhs = 1.0 + smoothing_sum(lat.dual(), 2.0 * kPi * sigma);
      EXPECT_NEAR(lhs, rhs, 1e-10 * rhs) << name << " sigma " << sigma;
    }
  }
}

TEST(GaussianMass, AtLeastInverseVolumeForCenteredLattice) {
  for (const char* name : {"Z3", "A2", "D4", "E8"}) {
    const Lattice lat = Lattice::standard(name);
    for (double sigma : {0.2, 0.5, 2.0}) {
      EXPECT_GE(gaussian_mass(lat, Vector::Zero(lat.dim()), sigma).value * lat.volume(), 1.0 - 1e-12);
    }
  }
}

TEST(MassZero, Examples) {
  const Lattice z = Lattice::standard("Z1");
  double s = 0.0;
  for (int k = -40; k <= 40; ++k) s += std::exp(-0.5 * k * k);
  EXPECT_NEAR(mass_zero(z, 1.0), 1.0 / s, 1e-14);
  EXPECT_NEAR(mass_zero(z, 1.0), 0.398942, 1e-6);
  EXPECT_NEAR(mass_zero(z.scaled(10.0), 1.0), 1.0, 1e-15);
}

TEST(MassZero, DecreasesWithSigma) {
  const Lattice z = Lattice::standard("Z1");
  double previous = 1.0;
  for (double sigma : {1.0, 2.0, 4.0, 8.0}) {
    const double p0 = mass_zero(z, sigma);
    EXPECT_NEAR(p0, oracle::pdf1(sigma, 0.0) / oracle::theta1(1.0, 0.0, sigma), 1e-13);
    EXPECT_LT(p0, previous);
    previous = p0;
  }
}

TEST(Entropy, IntegerLattice) {
  const double h = entropy_exact(Lattice::standard("Z1"), vec({0.0}), 1.0);
  double total = 0.0;
  for (int k = -20; k <= 20; ++k) total += std::exp(-0.5 * k * k);
  double direct = 0.0;
  for (int k = -20; k <= 20; ++k) {
    const double p = std::exp(-0.5 * k * k) / total;
    direct -= p * std::log(p);
  }
  EXPECT_NEAR(h, direct, 1e-9);
  EXPECT_NEAR(h, 0.5 * std::log(2.0 * kPi * std::numbers::e), 1e-4);
  EXPECT_NEAR(h, 1.41894, 1e-5);
}

TEST(Entropy, ConcentratedLattice) {
  const double h = entropy_exact(Lattice::standard("Z1").scaled(10.0), vec({0.0}), 1.0);
  const double a = 2.0 * std::exp(-50.0);
  const double two_term = std::log1p(a) + 100.0 * std::exp(-50.0) / (1.0 + a);
  EXPECT_GE(h, 0.0);
  EXPECT_NEAR(h, two_term, 1e-9);
  EXPECT_LT(h, 1e-15);
}

TEST(Entropy, AgainstDirectSumsAndShiftInvariance) {
  const Lattice a2 = Lattice::standard("A2");
  const Vector t = vec({0.3, 0.1});
  const double h = entropy_exact(a2, t, 0.8);
  EXPECT_NEAR(h, brute_entropy(a2, t, 0.8, 30), 1e-9);
  EXPECT_NEAR(h, entropy_exact(a2, t + a2.basis().col(0) - 2.0 * a2.basis().col(1), 0.8), 1e-10);
  const Lattice d4 = Lattice::standard("D4");
  const Vector t4 = vec({0.5, 0.1, -0.2, 0.0});
  EXPECT_NEAR(entropy_exact(d4, t4, 0.7), brute_entropy(d4, t4, 0.7, 7), 1e-9);
}

TEST(Flatness, IntegerLatticeUnitSigma) {
  const FlatnessBracket f = flatness_factor(Lattice::standard("Z1"), 1.0);
  EXPECT_NEAR(f.upper, 2.0 * std::exp(-2.0 * kPi * kPi), 1e-3 * f.upper);
  EXPECT_NEAR(f.upper, 5.35e-9, 0.01e-9);
  EXPECT_LE(f.lower, f.upper + 1e-15);
  EXPECT_GE(f.lower, 0.0);
}

TEST(Flatness, DivergesForSmallSigma) {
  double direct = 0.0;
  for (int k = 1; k < 200; ++k) direct += 2.0 * std::exp(-2.0 * kPi * kPi * 0.01 * k * k);
  const double upper = flatness_upper(Lattice::standard("Z1"), 0.1);
  EXPECT_NEAR(upper, direct, 1e-10 * direct);
  EXPECT_GT(upper, 1.0);
}

TEST(Flatness, ScaleInvariance) {
  const Lattice z = Lattice::standard("Z1");
  for (double sigma : {0.3, 0.5, 1.0}) {
    const double a = flatness_upper(z, sigma);
    const double b = flatness_upper(z.scaled(3.0), 3.0 * sigma);
    EXPECT_NEAR(a, b, 1e-10 * a + 1e-300);
  }
  const FlatnessBracket fa = flatness_factor(Lattice::standard("A2"), 0.4, 64, 5);
  const FlatnessBracket fb = flatness_factor(Lattice::standard("A2").scaled(3.0), 1.2, 64, 5);
  EXPECT_NEAR(fa.upper, fb.upper, 1e-10 * fa.upper);
}

TEST(Flatness, LowerNeverExceedsUpper) {
  for (const char* name : {"Z2", "A2", "D4", "E8"}) {
    for (double sigma : {0.25, 0.4, 0.7}) {
      const FlatnessBracket f = flatness_factor(Lattice::standard(name), sigma, 32, 3);
      EXPECT_LE(f.lower, f.upper * (1.0 + 1e-9) + 1e-15) << name << " " << sigma;
    }
  }
}

TEST(Smoothing, IntegerLatticeOnePercent) {
  const SmoothingResult r = smoothing_parameter(Lattice::standard("Z1"), 0.01);
  EXPECT_NEAR(r.s, smoothing_z_oracle(0.01), 1e-8);
  EXPECT_NEAR(r.s, 3.2552, 1e-4);
  EXPECT_LT(r.residual, 1e-10);
}

TEST(Smoothing, MonotoneInEpsilon) {
  const Lattice z = Lattice::standard("Z1");
  const double a = smoothing_parameter(z, 0.1).s;
  const double b = smoothing_parameter(z, 0.01).s;
  const double c = smoothing_parameter(z, 0.001).s;
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
  EXPECT_NEAR(a, smoothing_z_oracle(0.1), 1e-8);
  EXPECT_NEAR(c, smoothing_z_oracle(0.001), 1e-8);
}

TEST(Smoothing, ScalesInversely) {
  for (const char* name : {"Z2", "A2", "E8"}) {
    const Lattice lat = Lattice::standard(name);
    const double s = smoothing_parameter(lat, 0.05).s;
    EXPECT_NEAR(smoothing_parameter(lat.scaled(2.5), 0.05).s, s / 2.5, 1e-8 * s) << name;
  }
}

TEST(Smoothing, SumMatchesDirectEvaluation) {
  double direct = 0.0;
  for (int k = 1; k < 100; ++k) direct += 2.0 * std::exp(-0.5 * 1.7 * 1.7 * k * k);
  EXPECT_NEAR(smoothing_sum(Lattice::standard("Z1"), 1.7), direct, 1e-12 * direct);
}

TEST(RandomLatticeMean, LargeVolume) {
  const MeanCheckReport r = random_lattice_mean_check(2, 1e6, 50, 1.0, 3);
  EXPECT_NEAR(r.predicted, 1.0 / (2.0 * kPi) + 1e-6, 1e-15);
  EXPECT_NEAR(r.empirical_mean, r.predicted, 1e-4 * r.predicted);
}

TEST(RandomLatticeMean, OneDimensionalEnsembleIsScaledIntegers) {
  const MeanCheckReport r = random_lattice_mean_check(1, 4.0, 10, 1.0, 3);
  EXPECT_NEAR(r.empirical_mean, oracle::theta1(4.0, 0.0, 1.0), 1e-13);
  EXPECT_NEAR(r.predicted, 1.0 / std::sqrt(2.0 * kPi) + 0.25, 1e-15);
}

TEST(RandomLatticeMean, SmallSigmaOriginDominates) {
  const MeanCheckReport r = random_lattice_mean_check(2, 1.0, 2000, 0.05, 9);
  EXPECT_NEAR(r.predicted, 1.0 / (2.0 * kPi * 0.0025) + 1.0, 1e-10);
  EXPECT_NEAR(r.empirical_mean, r.predicted, 0.01 * r.predicted);
}

TEST(CosetSupport, ConsistentWithMassAndEntropy) {
  for (const char* name : {"Z2", "A2", "D4"}) {
    const Lattice lat = Lattice::standard(name);
    const Vector t = Vector::Constant(lat.dim(), 0.2);
    const CosetSupport s(lat, t, 0.9);
    EXPECT_NEAR(s.mass(), gaussian_mass(lat, t, 0.9).value, 1e-10 * s.mass()) << name;
    EXPECT_NEAR(s.entropy(), s.entropy_direct(), 1e-9) << name;
    if (!s.factorized()) {
      const double total = std::accumulate(s.probabilities().begin(), s.probabilities().end(), 0.0);
      EXPECT_NEAR(total, 1.0, 1e-12) << name;
    }
  }
}

TEST(CosetSupport, SecondMomentOfIntegerLattice) {
  double z = 0.0, m = 0.0;
  for (int k = -40; k <= 40; ++k) {
    const double w = std::exp(-(k + 0.3) * (k + 0.3) / 2.0);
    z += w;
    m += w * (k + 0.3) * (k + 0.3);
  }
  const CosetSupport s(Lattice::standard("Z1"), vec({0.3}), 1.0);
  EXPECT_NEAR(s.mean_sq_norm(), m / z, 1e-12);
}
