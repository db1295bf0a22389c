#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "dps/codec.hpp"
#include "dps/error.hpp"
#include "dps/gaussian_measures.hpp"
#include "dps/montecarlo.hpp"
#include "dps/rng.hpp"
#include "oracles.hpp"

using namespace dps;

namespace {

constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

double capacity_nats(double snr) { return 0.5 * std::log1p(snr); }

double upper_quantile(double p) {
  return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<>(), p));
}

// err_inv for Z^n from the per-coordinate product form.
double err_inv_zn(int n, double eps) { return 2.0 * upper_quantile((1.0 - std::pow(1.0 - eps, 1.0 / n)) / 2.0); }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(VoronoiEscape, IntegerLattice) {
  const double p = 2.0 * oracle::q_tail(1.0);
  EXPECT_NEAR(p, 0.31731, 1e-5);
  const CIEstimate e = voronoi_escape(Lattice::standard("Z1"), 0.5, 100000, {1, 1});
  EXPECT_LE(e.lo, p);
  EXPECT_GE(e.hi, p);
}

TEST(VoronoiEscape, IntegerPlane) {
  const double q = 2.0 * oracle::q_tail(1.0);
  const double p = 1.0 - (1.0 - q) * (1.0 - q);
  EXPECT_NEAR(p, 0.53394, 1e-5);
  const CIEstimate e = voronoi_escape(Lattice::standard("Z2"), 0.5, 100000, {2, 1});
  EXPECT_LE(e.lo, p);
  EXPECT_GE(e.hi, p);
}

TEST(VoronoiEscape, SmallNoise) {
  EXPECT_LT(voronoi_escape(Lattice::standard("Z1"), 0.05, 100000, {3, 1}).hi, 1e-3);
}

TEST(VoronoiEscape, ThreadCountDoesNotChangeResult) {
  const Lattice e8 = Lattice::standard("E8");
  const CIEstimate a = voronoi_escape(e8, 0.4, 30000, {4, 1});
  const CIEstimate b = voronoi_escape(e8, 0.4, 30000, {4, 3});
  EXPECT_EQ(a.p_hat, b.p_hat);
}

TEST(VoronoiGauge, Definition) {
  EXPECT_NEAR(voronoi_gauge(Lattice::standard("Z1"), vec({0.3})), 0.6, 1e-14);
  EXPECT_NEAR(voronoi_gauge(Lattice::standard("Z2"), vec({0.3, -0.7})), 1.4, 1e-14);
  RngStream rng(5);
  for (const char* name : {"A2", "D4", "E8"}) {
    const Lattice lat = Lattice::standard(name);
    for (int i = 0; i < 200; ++i) {
      Vector z(lat.dim());
      for (int j = 0; j < lat.dim(); ++j) z(j) = rng.normal();
      const double g = voronoi_gauge(lat, z);
      EXPECT_TRUE(closest_point(lat, z / (g * (1.0 + 1e-9))).coords.isZero()) << name;
      EXPECT_FALSE(closest_point(lat, z / (g * (1.0 - 1e-6))).coords.isZero()) << name;
    }
  }
}

TEST(InverseErrorFunction, IntegerLattice) {
  const double expect = 2.0 * upper_quantile(0.025);
  const ErrInvEstimate e = inverse_error_function(Lattice::standard("Z1"), 0.05, 200000, 0.01, {6, 1});
  EXPECT_NEAR(e.value, expect, 0.01 * expect);
  EXPECT_LE(e.lo, expect);
  EXPECT_GE(e.hi, expect);
  EXPECT_NEAR(expect, 3.9199, 1e-4);
}

TEST(InverseErrorFunction, IntegerLatticeDimensionEight) {
  const double expect = err_inv_zn(8, 0.05);
  EXPECT_NEAR(err_inv_integer_lattice(8, 0.05), expect, 1e-9);
  EXPECT_NEAR(expect, 5.4532, 2e-3);
  const ErrInvEstimate e = inverse_error_function(Lattice::standard("Z8"), 0.05, 200000, 0.01, {7, 1});
  EXPECT_NEAR(e.value, expect, 0.01 * expect);
  EXPECT_LE(e.lo, expect);
  EXPECT_GE(e.hi, expect);
}

TEST(InverseErrorFunction, MonotoneInEpsilon) {
  const Lattice a2 = Lattice::standard("A2");
  const double a = inverse_error_function(a2, 0.01, 200000, 0.02, {8, 1}).value;
  const double b = inverse_error_function(a2, 0.1, 200000, 0.02, {8, 1}).value;
  EXPECT_GT(a, b);
}

TEST(InverseErrorFunction, ResolutionExceeded) {
  try {
    inverse_error_function(Lattice::standard("Z2"), 0.05, 2000, 1e-4, {9, 1});
    FAIL() << "expected ResolutionExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ResolutionExceeded);
  }
}

TEST(Nvnr, IntegerLattices) {
  const NvnrEstimate z1 = nvnr(Lattice::standard("Z1"), 0.05, 200000, 0.01, {10, 1});
  const double g1 = std::pow(2.0 * upper_quantile(0.025), 2) / kTwoPiE;
  EXPECT_NEAR(g1, 0.8997, 1e-4);
  EXPECT_NEAR(z1.gamma, g1, 0.021 * g1);
  EXPECT_NEAR(z1.mu, z1.gamma * kTwoPiE, 1e-12);

  const NvnrEstimate z8 = nvnr(Lattice::standard("Z8"), 0.05, 200000, 0.01, {11, 1});
  const double g8 = std::pow(err_inv_zn(8, 0.05), 2) / kTwoPiE;
  EXPECT_NEAR(g8, 1.7409, 2e-3);
  EXPECT_NEAR(z8.gamma, g8, 0.021 * g8);
}

TEST(Nvnr, ScaleInvariant) {
  const Lattice a2 = Lattice::standard("A2");
  const NvnrEstimate a = nvnr(a2, 0.05, 100000, 0.02, {12, 1});
  const NvnrEstimate b = nvnr(a2.scaled(3.0), 0.05, 100000, 0.02, {12, 1});
  EXPECT_NEAR(a.gamma, b.gamma, 1e-9 * a.gamma);
  EXPECT_NEAR(b.err_inv.value, a.err_inv.value / 3.0, 1e-9);
}

TEST(DitherAudit, ConcentratedLatticeHasNoRate) {
  const Codec codec(CodecConfig{Lattice::standard("Z1"), 10.0, channel_params(1.0, 1.0), DitherNone{}, PeakOff{}});
  const DitherAudit a = dither_audit(codec, vec({0.0}), 0.05, 1.0, 2000, {13, 1});
  EXPECT_LT(a.rate, 1e-10);
  EXPECT_GT(capacity_nats(1.0) - a.rate, 0.34);
  EXPECT_LT(a.exact_power, 1e-15);
  EXPECT_EQ(a.err_rate.p_hat, 0.0);
}

TEST(DitherAudit, MassEventIsRare) {
  const Lattice z2 = Lattice::standard("Z2");
  const double threshold = std::exp(-4.0) / z2.volume();
  RngStream rng(14);
  int low = 0;
  const int dithers = 2000;
  for (int i = 0; i < dithers; ++i) {
    const Vector t = sample_dither_continuous(1.0, 2, rng);
    low += gaussian_mass(z2, t, 1.0).value <= threshold;
  }
  const CIEstimate ci = proportion_ci(low, dithers);
  EXPECT_LE(ci.hi, 0.05);
  EXPECT_LE(ci.lo, std::exp(-4.0));
}

TEST(DitherAudit, FieldsAreConsistent) {
  const Lattice e8 = Lattice::standard("E8");
  const ChannelParams p = channel_params(1.0, 1.0);
  const Codec codec(CodecConfig{e8, normalize_scale(p, 4.77), p, DitherContinuous{}, PeakOff{}});
  RngStream rng(15);
  const Vector t = codec.draw_dither(rng);
  const DitherAudit a = dither_audit(codec, t, 0.05, 1.33, 2000, {16, 1});
  const double sigma_s2 = p.sigma_s2;
  EXPECT_NEAR(a.exact_power, CosetSupport(codec.scaled_lattice(), t, 1.0).mean_sq_norm() / (8 * sigma_s2), 1e-12);
  EXPECT_NEAR(a.mass_threshold, std::exp(-4.0) / codec.scaled_lattice().volume(), 1e-15);
  EXPECT_EQ(a.pass_mass, a.mass >= a.mass_threshold);
  EXPECT_EQ(a.pass_error, a.err_rate.hi <= 6 * 0.05);
  EXPECT_EQ(a.pass_power_upper, a.exact_power <= 1.0 + 4.0 / std::sqrt(8.0));
  EXPECT_NEAR(a.rate_threshold, 0.5 * std::log(2.0) - (0.5 * std::log(1.33) + 2.0 / std::sqrt(8.0) + 0.5), 1e-12);
  EXPECT_NEAR(a.rate, entropy_exact(codec.scaled_lattice(), t, 1.0) / 8.0, 1e-9);
}

TEST(NegativeMoment, CoversVolume) {
  const std::pair<const char*, double> cases[] = {{"Z1", 1.0}, {"A2", 1.0}};
  for (const auto& [name, c] : cases) {
    const Lattice lat = Lattice::standard(name).scaled(c);
    const CIEstimate m = negative_moment_check(lat, 1.0, 10000, {17, 1});
    EXPECT_LE(m.lo, lat.volume() * (1 + 1e-9)) << name;
    EXPECT_GE(m.hi, lat.volume() * (1 - 1e-9)) << name;
  }
  const Lattice two_z = Lattice::standard("Z1").scaled(2.0);
  const CIEstimate m = negative_moment_check(two_z, 1.0, 10000, {18, 1});
  EXPECT_LE(m.lo, 2.0);
  EXPECT_GE(m.hi, 2.0);
}

TEST(Chernoff, BoundValueAndPass) {
  const ChernoffReport r = chernoff_power_check(Lattice::standard("Z4"), 1.0, 0.9, 2000, {19, 1});
  EXPECT_NEAR(r.upper_bound, std::exp(-0.324), 1e-12);
  EXPECT_NEAR(r.upper_bound, 0.723, 1e-3);
  EXPECT_NEAR(r.lower_bound, std::exp(-(0.2025 + 0.1215) * 4), 1e-12);
  EXPECT_LE(r.upper_tail.p_hat, r.upper_bound);
  EXPECT_TRUE(r.pass);
}

TEST(Chernoff, TailShrinksWithDimension) {
  const ChernoffReport z4 = chernoff_power_check(Lattice::standard("Z4").scaled(2.5), 1.0, 0.3, 2000, {20, 1});
  const ChernoffReport z8 = chernoff_power_check(Lattice::standard("Z8").scaled(2.5), 1.0, 0.3, 2000, {20, 1});
  EXPECT_LT(z8.upper_tail.p_hat + z8.lower_tail.p_hat, z4.upper_tail.p_hat + z4.lower_tail.p_hat);
}

TEST(Chernoff, UndisturbedConcentratedLattice) {
  // Without a dither, the conditional second moment on 10Z is essentially 0, so
  // the lower-tail event holds with certainty while the bound is below 1.
  const double m = CosetSupport(Lattice::standard("Z1").scaled(10.0), vec({0.0}), 1.0).mean_sq_norm();
  EXPECT_LT(m, 1e-19);
  EXPECT_LE(m, (1.0 - 0.5) * 1.0);
  EXPECT_LT(std::exp(-(0.25 / 4 + 0.125 / 6)), 1.0);
}

TEST(EntropyBounds, ExponentAtPi) {
  const double pi = std::numbers::pi;
  const double phi = 1.0 - std::log(2.0 * pi * std::numbers::e) / (2.0 * pi);
  EXPECT_NEAR(entropy_bound_exponent(pi), phi, 1e-15);
  EXPECT_NEAR(phi, 0.548338, 1e-6);
}

TEST(EntropyBounds, LimitAtCertainZero) {
  EXPECT_NEAR(entropy_mass_bound(1.0, 8), 1.8 * std::exp(-13.6) / 8.0, 1e-18);
  EXPECT_LT(entropy_mass_bound(1.0, 8), 1e-6);
}

TEST(EntropyBounds, RoundedConstantsDominate) {
  RngStream rng(21);
  for (int n = 1; n <= 50; ++n) {
    const double p0 = 0.05 + 0.95 * rng.uniform();
    EXPECT_GE(entropy_mass_bound(p0, n), entropy_mass_bound_general(p0, n, std::numbers::pi)) << n;
  }
}

TEST(EntropyBounds, HoldForIntegerLattice) {
  for (double sigma : {0.3, 0.6, 1.0, 2.0}) {
    const Lattice z = Lattice::standard("Z1");
    const double h = entropy_exact(z, vec({0.0}), sigma);
    EXPECT_LE(h, entropy_mass_bound(mass_zero(z, sigma), 1) + 1e-12) << sigma;
  }
}

TEST(Converse, LowSnrIntegerLattice) {
  const ConverseReport r = converse_experiment(Lattice::standard("Z1"), 1.0, 2.0, 100000, {22, 1});
  EXPECT_TRUE(r.applies);
  EXPECT_NEAR(r.p0, 1.0 / oracle::theta1(1.0, 0.0, 1.0) * oracle::pdf1(1.0, 0.0), 1e-12);
  EXPECT_NEAR(r.half_gap, 0.5 * (1.0 - r.p0), 1e-15);
  EXPECT_GE(r.p_err.hi, r.half_gap);
  EXPECT_LE(r.entropy_rate, r.entropy_upper);
  EXPECT_TRUE(r.pass_entropy);
  EXPECT_TRUE(r.pass_error);
}

TEST(SamplingLemma, PassesOnIntegerAndHexagonalLattices) {
  for (const char* name : {"Z4", "A2"}) {
    const SamplingLemmaReport r = sampling_lemma_suite(Lattice::standard(name), 1.0, 100000, {23, 1});
    EXPECT_TRUE(r.pass) << name;
    EXPECT_EQ(r.ks.size(), static_cast<std::size_t>(Lattice::standard(name).dim()));
    EXPECT_LT(std::abs(r.power_z), 3.0) << name;
  }
}

TEST(SamplingLemma, UnditheredControlFails) {
  const SamplingLemmaReport r = sampling_lemma_suite(Lattice::standard("Z1"), 0.3, 20000, {24, 1}, false);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.ks[0].p_value, 1e-6);
}
