#pragma once

#include <cstdint>
#include <vector>

#include "dps/codec.hpp"
#include "dps/lattice.hpp"
#include "dps/parallel.hpp"
#include "dps/stats.hpp"

namespace dps {

// Pr[closest_point(Lambda, sigma Z) != 0] for standard normal Z.
CIEstimate voronoi_escape(const Lattice& lattice, double sigma, std::uint64_t trials, const RunOptions& opts = {});

// Smallest s with z in s V(Lambda) (closed cell), i.e. max over lattice v of
// 2 <z, v> / |v|^2.
double voronoi_gauge(const Lattice& lattice, const Vector& z);

// err_inv_eps(Lambda): the scale s with Pr[Z outside s V(Lambda)] = eps.
struct ErrInvEstimate {
  double value = 0.0;
  double lo = 0.0;  // 99% order-statistic interval
  double hi = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kDefaultErrInvTrials = 200000;
inline constexpr double kDefaultErrInvTol = 0.01;

// (1 - eps)-quantile of the Voronoi gauge of standard normal samples. Throws
// ResolutionExceeded when the interval half-width exceeds tol * value.
ErrInvEstimate inverse_error_function(const Lattice& lattice, double epsilon,
                                      std::uint64_t trials = kDefaultErrInvTrials, double tol = kDefaultErrInvTol,
                                      const RunOptions& opts = {});

// Closed form for Z^n: 2 Q^{-1}((1 - (1 - eps)^{1/n}) / 2).
double err_inv_integer_lattice(int n, double epsilon);

struct NvnrEstimate {
  double mu = 0.0;     // err_inv^2 V^{2/n}
  double gamma = 0.0;  // mu / (2 pi e)
  ErrInvEstimate err_inv;
};
NvnrEstimate nvnr(const Lattice& lattice, double epsilon, std::uint64_t trials = kDefaultErrInvTrials,
                  double tol = kDefaultErrInvTol, const RunOptions& opts = {});

// Audit of one dither against the events of the achievability proof.
struct DitherAudit {
  Vector dither;
  CIEstimate err_rate;
  CIEstimate avg_power;      // sampled |X|^2 / (n sigma_s^2)
  double exact_power = 0.0;  // E[|X|^2 | T] / (n sigma_s^2), by enumeration
  double mass = 0.0;         // f_{sigma_s}(s Lambda + t)
  double mass_threshold = 0.0;
  double rate = 0.0;  // entropy per dimension, nats
  double rate_threshold = 0.0;
  bool pass_error = false;        // err_rate.hi <= 6 eps
  bool pass_power_upper = false;  // exact_power <= 1 + 4 / sqrt(n)
  bool pass_power_lower = false;  // exact_power >= 1 - 4 / sqrt(n)
  bool pass_mass = false;         // mass >= exp(-4) / V
  bool pass_rate = false;         // rate >= C - (log(gamma) / 2 + 2 / sqrt(n) + 4 / n)

  bool pass_all() const { return pass_error && pass_power_upper && pass_mass && pass_rate; }
};

DitherAudit dither_audit(const Codec& codec, const Vector& dither, double epsilon, double gamma,
                         std::uint64_t trials, const RunOptions& opts = {});

struct Theorem1Report {
  double err_inv = 0.0;
  double gamma = 0.0;
  double scale = 0.0;
  std::uint64_t dithers = 0;
  std::uint64_t passed = 0;
  double pass_fraction = 0.0;
  double threshold = 0.0;  // 1/2 - 3 binomial standard errors
  bool pass = false;
  std::vector<DitherAudit> audits;
};

Theorem1Report theorem1_audit(const Lattice& lattice, double snr, double epsilon, std::uint64_t dithers,
                              std::uint64_t trials_per_dither, const RunOptions& opts = {},
                              std::uint64_t err_inv_trials = kDefaultErrInvTrials);

// Mean of 1 / f_sigma(Lambda + T) over T ~ N(0, sigma^2 I); equals V(Lambda).
CIEstimate negative_moment_check(const Lattice& lattice, double sigma, std::uint64_t dithers,
                                 const RunOptions& opts = {});

struct ChernoffReport {
  CIEstimate upper_tail;  // Pr_T[E[|X / sigma_s|^2 | T] >= (1 + eps) n]
  CIEstimate lower_tail;  // Pr_T[E[|X / sigma_s|^2 | T] <= (1 - eps) n]
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  bool pass = false;
};
ChernoffReport chernoff_power_check(const Lattice& lattice, double sigma_s, double epsilon, std::uint64_t dithers,
                                    const RunOptions& opts = {});

// phi(a) = 1 - log(2 a e) / (2 a).
double entropy_bound_exponent(double a);
// -(1/n) log P0 + a (1 - P0) + exp(-a phi(a) n) / (n phi(a)).
double entropy_mass_bound_general(double p0, int n, double a);
// The same with a = pi and rounded constants: -(1/n) log P0 + pi (1 - P0) + 1.8 exp(-1.7 n) / n.
double entropy_mass_bound(double p0, int n);

struct ConverseReport {
  double p0 = 0.0;
  double entropy_rate = 0.0;
  double entropy_upper = 0.0;
  double half_gap = 0.0;  // (1 - P0) / 2
  CIEstimate p_err;
  bool applies = false;  // SNR < 1
  bool pass_entropy = false;
  bool pass_error = false;
};
ConverseReport converse_experiment(const Lattice& lattice, double sigma_s, double sigma_w, std::uint64_t trials,
                                   const RunOptions& opts = {});

struct SamplingLemmaReport {
  std::vector<TestResult> ks;  // one per coordinate
  TestResult radial;           // chi-square of |X|^2 / sigma_s^2 against chi^2(n) deciles
  CIEstimate mean_power;       // |X|^2
  double power_z = 0.0;        // (mean - n sigma_s^2) / SE
  double power_p = 0.0;
  double level = 0.0;  // per-test level after Bonferroni
  bool pass = false;
};

// X ~ D_{Lambda + T, sigma_s} with T ~ N(0, sigma_s^2 I) (or T = 0 when
// dithered is false), tested against N(0, sigma_s^2 I).
SamplingLemmaReport sampling_lemma_suite(const Lattice& lattice, double sigma_s, std::uint64_t samples,
                                         const RunOptions& opts = {}, bool dithered = true);

}  // namespace dps
