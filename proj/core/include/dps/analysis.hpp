#pragma once

#include <cstdint>
#include <optional>

#include "dps/lattice.hpp"
#include "dps/montecarlo.hpp"
#include "dps/parallel.hpp"
#include "dps/stats.hpp"

namespace dps {

// AWGN capacity (1/2) log(1 + snr), nats per dimension.
double capacity(double snr);
// Channel dispersion (1/2)(1 - 1/(1 + snr)^2), nats^2.
double dispersion(double snr);
// Inverse of the standard normal upper tail Q.
double q_inverse(double p);

struct FiniteBlocklengthReport {
  double capacity = 0.0;            // nats/dim
  double dispersion = 0.0;          // nats^2
  double normal_approx_rate = 0.0;  // C - sqrt(V / n) Q^{-1}(eps)
  double delta_star = 0.0;          // -(1/2) log(2 pi e sigma^2)
  double delta_eps_n = 0.0;         // delta_star - sqrt(1 / 2n) Q^{-1}(eps)
  std::optional<double> theorem1_gap;  // (1/2) log gamma + 2 / sqrt(n) + 4 / n
  double intro_gap = 0.0;              // (2n)^{-1/2} (Q^{-1}(eps) + sqrt(8))
  double noise_sigma = 0.0;            // sigma used for delta_star
};

// O(log n / n) terms are not included. noise_sigma defaults to sigma_eff at
// unit signal power, 1 / sqrt(1 + snr).
FiniteBlocklengthReport finite_blocklength(double snr, int n, double epsilon,
                                           std::optional<double> gamma = std::nullopt,
                                           std::optional<double> noise_sigma = std::nullopt);

// Smoothing-parameter bracket around the inverse error function.
struct SandwichReport {
  double lower = 0.0;  // smoothing parameter at eps / (1 - eps)
  ErrInvEstimate mid;
  double upper = 0.0;  // twice the smoothing parameter at eps
  bool ok = false;     // lower <= mid.hi and mid.lo <= upper
};
SandwichReport cdlp_sandwich(const Lattice& lattice, double epsilon, std::uint64_t trials = kDefaultErrInvTrials,
                             double tol = kDefaultErrInvTol, const RunOptions& opts = {});

struct DitherRateBound {
  double rate = 0.0;  // max(0, (1/2)(1 - log(1 + snr))), nats per channel use
  bool no_dither_needed = false;  // snr >= e - 1
};
DitherRateBound dither_rate_bound(double snr);

struct NsmEstimate {
  CIEstimate g;  // normalized second moment E|u|^2 / (n V^{2/n})
  bool above_sphere_bound = false;  // g.hi * 2 pi e >= 1
};
// u uniform on the Voronoi cell (uniform in the fundamental parallelepiped,
// reduced mod the lattice).
NsmEstimate normalized_second_moment(const Lattice& lattice, std::uint64_t trials, const RunOptions& opts = {});

struct ConjectureReport {
  NsmEstimate nsm;
  double mu = 0.0;
  double gamma = 0.0;
  double bound = 0.0;               // (1/2) log(mu G)
  double theorem1_leading = 0.0;    // (1/2) log gamma
};
ConjectureReport zamir_conjecture_bound(const Lattice& lattice, double epsilon, std::uint64_t nsm_trials,
                                        const RunOptions& opts = {},
                                        std::uint64_t err_inv_trials = kDefaultErrInvTrials);

}  // namespace dps
