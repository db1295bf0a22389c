#include "dps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "dps/error.hpp"
#include "dps/gaussian_measures.hpp"

namespace dps {
namespace {

// Rational approximation of the standard normal quantile (relative error
// about 1e-9), used as the starting point for Newton refinement.
double quantile_guess(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double capacity(double snr) {
  if (!(snr > 0.0)) fail(ErrorCode::NonPositive, "snr must be positive");
  return 0.5 * std::log1p(snr);
}

double dispersion(double snr) {
  if (!(snr > 0.0)) fail(ErrorCode::NonPositive, "snr must be positive");
  const double r = 1.0 / (1.0 + snr);
  return 0.5 * (1.0 - r * r);
}

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParams, "q_inverse needs p in (0, 1)");
  // Q^{-1}(p) is the (1 - p) quantile.
  double x = -quantile_guess(p);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(detail::kTwoPi);
  for (int i = 0; i < 2; ++i) {
    const double density = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    x += (normal_q(x) - p) / density;
  }
  return x;
}

FiniteBlocklengthReport finite_blocklength(double snr, int n, double epsilon, std::optional<double> gamma,
                                           std::optional<double> noise_sigma) {
  if (n < 1) fail(ErrorCode::InvalidParams, "n must be at least 1");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) fail(ErrorCode::InvalidParams, "epsilon must lie in (0, 0.5]");
  FiniteBlocklengthReport out;
  out.capacity = capacity(snr);
  out.dispersion = dispersion(snr);
  const double qi = q_inverse(epsilon);
  out.normal_approx_rate = out.capacity - std::sqrt(out.dispersion / n) * qi;
  out.noise_sigma = noise_sigma.value_or(1.0 / std::sqrt(1.0 + snr));
  if (!(out.noise_sigma > 0.0)) fail(ErrorCode::NonPositive, "noise sigma must be positive");
  out.delta_star = -0.5 * std::log(detail::kTwoPiE * out.noise_sigma * out.noise_sigma);
  out.delta_eps_n = out.delta_star - std::sqrt(0.5 / n) * qi;
  if (gamma) {
    if (!(*gamma > 0.0)) fail(ErrorCode::NonPositive, "gamma must be positive");
    out.theorem1_gap = 0.5 * std::log(*gamma) + 2.0 / std::sqrt(n) + 4.0 / n;
  }
  out.intro_gap = (qi + std::sqrt(8.0)) / std::sqrt(2.0 * n);
  return out;
}

SandwichReport cdlp_sandwich(const Lattice& lattice, double epsilon, std::uint64_t trials, double tol,
                             const RunOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) fail(ErrorCode::InvalidParams, "epsilon must lie in (0, 0.5)");
  SandwichReport out;
  out.lower = smoothing_parameter(lattice, epsilon / (1.0 - epsilon)).s;
  out.upper = 2.0 * smoothing_parameter(lattice, epsilon).s;
  out.mid = inverse_error_function(lattice, epsilon, trials, tol, opts);
  out.ok = out.lower <= out.mid.hi && out.mid.lo <= out.upper;
  return out;
}

DitherRateBound dither_rate_bound(double snr) {
  if (!(snr > 0.0)) fail(ErrorCode::NonPositive, "snr must be positive");
  DitherRateBound out;
  out.rate = std::max(0.0, 0.5 * (1.0 - std::log1p(snr)));
  out.no_dither_needed = snr >= std::numbers::e - 1.0;
  return out;
}

NsmEstimate normalized_second_moment(const Lattice& lattice, std::uint64_t trials, const RunOptions& opts) {
  if (trials < 100) fail(ErrorCode::InvalidParams, "need at least 100 trials");
  const int n = lattice.dim();
  const double norm = n * std::pow(lattice.volume(), 2.0 / n);
  const std::size_t blocks = block_count(trials);
  std::vector<std::pair<double, double>> sums(blocks);
  parallel_blocks(blocks, opts.threads, [&](std::size_t b) {
    RngStream rng(opts.seed, b);
    const std::uint64_t start = static_cast<std::uint64_t>(b) * kBlockSize;
    const std::uint64_t m = std::min<std::uint64_t>(kBlockSize, trials - start);
    detail::CompensatedSum s;
    detail::CompensatedSum s2;
    Vector coeffs(n);
    for (std::uint64_t i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) coeffs(j) = rng.uniform();
      const double q = mod_lattice(lattice, lattice.basis() * coeffs).squaredNorm() / norm;
      s.add(q);
      s2.add(q * q);
    }
    sums[b] = {s.value(), s2.value()};
  });
  detail::CompensatedSum s;
  detail::CompensatedSum s2;
  for (const auto& [a, c] : sums) {
    s.add(a);
    s2.add(c);
  }
  NsmEstimate out;
  out.g = mean_ci(s.value(), s2.value(), trials, opts.seed);
  out.above_sphere_bound = out.g.hi * detail::kTwoPiE >= 1.0;
  return out;
}

ConjectureReport zamir_conjecture_bound(const Lattice& lattice, double epsilon, std::uint64_t nsm_trials,
                                        const RunOptions& opts, std::uint64_t err_inv_trials) {
  if (nsm_trials < 10000) fail(ErrorCode::InvalidParams, "need at least 10^4 second-moment trials");
  ConjectureReport out;
  out.nsm = normalized_second_moment(lattice, nsm_trials, RunOptions{derive_seed(opts.seed, 1), opts.threads});
  const NvnrEstimate nv = nvnr(lattice, epsilon, err_inv_trials, kDefaultErrInvTol,
                               RunOptions{derive_seed(opts.seed, 2), opts.threads});
  out.mu = nv.mu;
  out.gamma = nv.gamma;
  out.bound = 0.5 * std::log(out.mu * out.nsm.g.p_hat);
  out.theorem1_leading = 0.5 * std::log(out.gamma);
  return out;
}

}  // namespace dps
