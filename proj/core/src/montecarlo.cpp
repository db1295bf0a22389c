#include "dps/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "detail.hpp"
#include "dps/analysis.hpp"
#include "dps/error.hpp"
#include "dps/gaussian_measures.hpp"
#include "dps/sampler.hpp"

namespace dps {
namespace {

using detail::CompensatedSum;

bool is_origin(const LatticePoint& p) { return (p.coords.array() == 0).all(); }

std::uint64_t block_items(std::size_t b, std::uint64_t total, std::uint64_t block = kBlockSize) {
  const std::uint64_t start = static_cast<std::uint64_t>(b) * block;
  return std::min(block, total - start);
}

// Per-block counters merged in block order.
struct Tally {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace

CIEstimate voronoi_escape(const Lattice& lat, double sigma, std::uint64_t trials, const RunOptions& opts) {
  if (!(sigma > 0.0)) fail(ErrorCode::NonPositive, "sigma must be positive");
  if (trials < 100) fail(ErrorCode::InvalidParams, "voronoi_escape needs at least 100 trials");
  const std::size_t blocks = block_count(trials);
  std::vector<std::uint64_t> escapes(blocks, 0);
  parallel_blocks(blocks, opts.threads, [&](std::size_t b) {
    RngStream rng(opts.seed, b);
    const std::uint64_t m = block_items(b, trials);
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
      if (!is_origin(closest_point(lat, sample_normal(sigma, lat.dim(), rng)))) ++k;
    }
    escapes[b] = k;
  });
  std::uint64_t total = 0;
  for (auto e : escapes) total += e;
  return proportion_ci(total, trials, opts.seed);
}

double voronoi_gauge(const Lattice& lat, const Vector& z) {
  if (z.size() != lat.dim()) fail(ErrorCode::DimensionMismatch, "z has wrong dimension");
  if (z.isZero(0.0)) return 0.0;
  // Lower bound from the reduced basis vectors, then climb: whenever z / s has
  // a nonzero closest point c, the gauge exceeds 2 <z, c> / |c|^2 > s.
  const Matrix& b = lat.reduced_basis();
  double s = 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    s = std::max(s, 2.0 * std::abs(z.dot(b.col(j))) / b.col(j).squaredNorm());
  }
  for (int it = 0; it < 10000; ++it) {
    const LatticePoint c = closest_point(lat, z / s);
    if (is_origin(c)) return s;
    const double next = 2.0 * z.dot(c.embedding) / c.embedding.squaredNorm();
    if (!(next > s)) return s;
    s = next;
  }
  fail(ErrorCode::InternalMismatch, "voronoi gauge did not converge");
}

ErrInvEstimate inverse_error_function(const Lattice& lat, double epsilon, std::uint64_t trials, double tol,
                                      const RunOptions& opts) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) fail(ErrorCode::InvalidParams, "epsilon must lie in (0, 0.5]");
  if (!(tol > 0.0)) fail(ErrorCode::InvalidParams, "tol must be positive");
  if (trials < 100) fail(ErrorCode::InvalidParams, "need at least 100 trials");
  const int n = lat.dim();
  std::vector<double> gauges(trials);
  const std::size_t blocks = block_count(trials);
  parallel_blocks(blocks, opts.threads, [&](std::size_t b) {
    RngStream rng(opts.seed, b);
    const std::uint64_t start = static_cast<std::uint64_t>(b) * kBlockSize;
    const std::uint64_t m = block_items(b, trials);
    for (std::uint64_t i = 0; i < m; ++i) gauges[start + i] = voronoi_gauge(lat, sample_normal(1.0, n, rng));
  });
  std::sort(gauges.begin(), gauges.end());
  const auto count = static_cast<std::int64_t>(trials);
  const auto index = static_cast<std::int64_t>(std::ceil((1.0 - epsilon) * static_cast<double>(trials))) - 1;
  const QuantileBracket bracket = quantile_bracket(trials, 1.0 - epsilon);
  if (bracket.lo_index < 0 || bracket.hi_index >= count) {
    fail(ErrorCode::ResolutionExceeded, "too few trials to bracket the quantile");
  }
  ErrInvEstimate out;
  out.trials = trials;
  out.seed = opts.seed;
  out.value = gauges[static_cast<std::size_t>(std::clamp<std::int64_t>(index, 0, count - 1))];
  out.lo = gauges[static_cast<std::size_t>(bracket.lo_index)];
  out.hi = gauges[static_cast<std::size_t>(bracket.hi_index)];
  if (0.5 * (out.hi - out.lo) > tol * out.value) {
    fail(ErrorCode::ResolutionExceeded, "confidence interval wider than tolerance; increase trials");
  }
  return out;
}

double err_inv_integer_lattice(int n, double epsilon) {
  if (n < 1 || !(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::InvalidParams, "need n >= 1, eps in (0, 1)");
  const double per_coordinate = -std::expm1(std::log1p(-epsilon) / n);
  return 2.0 * q_inverse(per_coordinate / 2.0);
}

NvnrEstimate nvnr(const Lattice& lat, double epsilon, std::uint64_t trials, double tol, const RunOptions& opts) {
  NvnrEstimate out;
  out.err_inv = inverse_error_function(lat, epsilon, trials, tol, opts);
  out.mu = out.err_inv.value * out.err_inv.value * std::pow(lat.volume(), 2.0 / lat.dim());
  out.gamma = out.mu / detail::kTwoPiE;
  return out;
}

DitherAudit dither_audit(const Codec& codec, const Vector& dither, double epsilon, double gamma,
                         std::uint64_t trials, const RunOptions& opts) {
  if (trials < 1) fail(ErrorCode::InvalidParams, "trials must be positive");
  const int n = codec.dim();
  const ChannelParams& params = codec.config().params;
  const double norm = n * params.sigma_s2;
  const DiscreteGaussianSampler sampler = codec.coding_sampler(dither);
  const CosetSupport& support = sampler.support();

  DitherAudit out;
  out.dither = dither;
  out.exact_power = support.mean_sq_norm() / norm;
  out.mass = support.mass();
  out.mass_threshold = std::exp(-4.0) / codec.scaled_lattice().volume();
  out.rate = support.entropy() / n;
  out.rate_threshold = capacity(params.snr) - (0.5 * std::log(gamma) + 2.0 / std::sqrt(n) + 4.0 / n);

  const std::size_t blocks = block_count(trials);
  std::vector<Tally> tallies(blocks);
  parallel_blocks(blocks, opts.threads, [&](std::size_t b) {
    RngStream rng(opts.seed, b);
    Tally t;
    const std::uint64_t m = block_items(b, trials);
    for (std::uint64_t i = 0; i < m; ++i) {
      const TransmissionRecord rec = codec.trial(sampler, dither, rng);
      if (rec.error) ++t.count;
      const double p = rec.x.squaredNorm() / norm;
      t.sum += p;
      t.sum_sq += p * p;
    }
    tallies[b] = t;
  });
  std::uint64_t errors = 0;
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (const auto& t : tallies) {
    errors += t.count;
    sum.add(t.sum);
    sum_sq.add(t.sum_sq);
  }
  out.err_rate = proportion_ci(errors, trials, opts.seed);
  out.avg_power = mean_ci(sum.value(), sum_sq.value(), trials, opts.seed);

  out.pass_error = out.err_rate.hi <= 6.0 * epsilon;
  out.pass_power_upper = out.exact_power <= 1.0 + 4.0 / std::sqrt(n);
  out.pass_power_lower = out.exact_power >= 1.0 - 4.0 / std::sqrt(n);
  out.pass_mass = out.mass >= out.mass_threshold;
  out.pass_rate = out.rate >= out.rate_threshold;
  return out;
}

Theorem1Report theorem1_audit(const Lattice& lat, double snr, double epsilon, std::uint64_t dithers,
                              std::uint64_t trials_per_dither, const RunOptions& opts, std::uint64_t err_inv_trials) {
  if (dithers < 1) fail(ErrorCode::InvalidParams, "need at least one dither");
  Theorem1Report out;
  const ChannelParams params = channel_params_from_snr(snr, 1.0);
  const NvnrEstimate nv = nvnr(lat, epsilon, err_inv_trials, kDefaultErrInvTol,
                               RunOptions{derive_seed(opts.seed, 1), opts.threads});
  out.err_inv = nv.err_inv.value;
  out.gamma = nv.gamma;
  out.scale = normalize_scale(params, nv.err_inv.value);
  const Codec codec(CodecConfig{lat, out.scale, params, DitherContinuous{}, PeakOff{}});

  out.dithers = dithers;
  out.audits.resize(dithers);
  // Dithers in parallel, trials within each audit sequential.
  parallel_blocks(dithers, opts.threads, [&](std::size_t d) {
    RngStream rng(derive_seed(opts.seed, 2), d);
    const Vector t = codec.draw_dither(rng);
    out.audits[d] = dither_audit(codec, t, epsilon, nv.gamma, trials_per_dither,
                                 RunOptions{derive_seed(opts.seed, 1000 + d), 1});
  });
  for (const auto& a : out.audits) {
    if (a.pass_all()) ++out.passed;
  }
  out.pass_fraction = static_cast<double>(out.passed) / static_cast<double>(dithers);
  out.threshold = 0.5 - 3.0 * std::sqrt(0.25 / static_cast<double>(dithers));
  out.pass = out.pass_fraction >= out.threshold;
  return out;
}

CIEstimate negative_moment_check(const Lattice& lat, double sigma, std::uint64_t dithers, const RunOptions& opts) {
  if (dithers < 100) fail(ErrorCode::InvalidParams, "need at least 100 dithers");
  const std::size_t blocks = block_count(dithers, 256);
  std::vector<Tally> tallies(blocks);
  parallel_blocks(blocks, opts.threads, [&](std::size_t b) {
    RngStream rng(opts.seed, b);
    Tally t;
    const std::uint64_t m = block_items(b, dithers, 256);
    for (std::uint64_t i = 0; i < m; ++i) {
      const Vector shift = sample_normal(sigma, lat.dim(), rng);
      const double inv = std::exp(-gaussian_mass(lat, shift, sigma, 1e-10).log_value);
      t.sum += inv;
      t.sum_sq += inv * inv;
    }
    tallies[b] = t;
  });
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (const auto& t : tallies) {
    sum.add(t.sum);
    sum_sq.add(t.sum_sq);
  }
  return mean_ci(sum.value(), sum_sq.value(), dithers, opts.seed);
}

ChernoffReport chernoff_power_check(const Lattice& lat, double sigma_s, double epsilon, std::uint64_t dithers,
                                    const RunOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::InvalidParams, "epsilon must lie in (0, 1)");
  if (dithers < 1) fail(ErrorCode::InvalidParams, "need at least one dither");
  const int n = lat.dim();
  const std::size_t blocks = block_count(dithers, 256);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts(blocks);
  parallel_blocks(blocks, opts.threads, [&](std::size_t b) {
    RngStream rng(opts.seed, b);
    std::uint64_t up = 0;
    std::uint64_t down = 0;
    const std::uint64_t m = block_items(b, dithers, 256);
    for (std::uint64_t i = 0; i < m; ++i) {
      const Vector t = sample_normal(sigma_s, n, rng);
      const double power = CosetSupport(lat, t, sigma_s).mean_sq_norm() / (sigma_s * sigma_s);
      if (power >= (1.0 + epsilon) * n) ++up;
      if (power <= (1.0 - epsilon) * n) ++down;
    }
    counts[b] = {up, down};
  });
  std::uint64_t up = 0;
  std::uint64_t down = 0;
  for (const auto& [u, d] : counts) {
    up += u;
    down += d;
  }
  ChernoffReport out;
  out.upper_tail = proportion_ci(up, dithers, opts.seed);
  out.lower_tail = proportion_ci(down, dithers, opts.seed);
  const double e2 = epsilon * epsilon / 4.0;
  const double e3 = epsilon * epsilon * epsilon / 6.0;
  out.upper_bound = std::exp(-(e2 - e3) * n);
  out.lower_bound = std::exp(-(e2 + e3) * n);
  out.pass = out.upper_tail.lo <= out.upper_bound && out.lower_tail.lo <= out.lower_bound;
  return out;
}

double entropy_bound_exponent(double a) {
  if (!(a > 1.0)) fail(ErrorCode::InvalidParams, "the entropy bound needs a > 1");
  return 1.0 - std::log(2.0 * a * std::numbers::e) / (2.0 * a);
}

double entropy_mass_bound_general(double p0, int n, double a) {
  const double phi = entropy_bound_exponent(a);
  return -std::log(p0) / n + a * (1.0 - p0) + std::exp(-a * phi * n) / (n * phi);
}

double entropy_mass_bound(double p0, int n) {
  return -std::log(p0) / n + std::numbers::pi * (1.0 - p0) + 1.8 * std::exp(-1.7 * n) / n;
}

ConverseReport converse_experiment(const Lattice& lat, double sigma_s, double sigma_w, std::uint64_t trials,
                                   const RunOptions& opts) {
  if (trials < 1) fail(ErrorCode::InvalidParams, "trials must be positive");
  const int n = lat.dim();
  const ChannelParams params = channel_params(sigma_s * sigma_s, sigma_w * sigma_w);
  ConverseReport out;
  out.p0 = mass_zero(lat, sigma_s);
  out.entropy_rate = entropy_exact(lat, Vector::Zero(n), sigma_s) / n;
  out.entropy_upper = entropy_mass_bound(out.p0, n);
  out.half_gap = 0.5 * (1.0 - out.p0);
  out.applies = params.snr < 1.0;

  const Codec codec(CodecConfig{lat, 1.0, params, DitherNone{}, PeakOff{}});
  const std::size_t blocks = block_count(trials);
  std::vector<std::uint64_t> errors(blocks, 0);
  parallel_blocks(blocks, opts.threads, [&](std::size_t b) {
    RngStream rng(opts.seed, b);
    std::uint64_t k = 0;
    const std::uint64_t m = block_items(b, trials);
    for (std::uint64_t i = 0; i < m; ++i) {
      if (codec.trial(rng).error) ++k;
    }
    errors[b] = k;
  });
  std::uint64_t total = 0;
  for (auto e : errors) total += e;
  out.p_err = proportion_ci(total, trials, opts.seed);
  out.pass_entropy = out.entropy_rate <= out.entropy_upper + 1e-9;
  out.pass_error = !out.applies || out.p_err.hi >= out.half_gap;
  return out;
}

SamplingLemmaReport sampling_lemma_suite(const Lattice& lat, double sigma_s, std::uint64_t samples,
                                         const RunOptions& opts, bool dithered) {
  if (!(sigma_s > 0.0)) fail(ErrorCode::NonPositive, "sigma_s must be positive");
  if (samples < 10000) fail(ErrorCode::InvalidParams, "need at least 10^4 samples");
  const int n = lat.dim();
  Matrix draws(n, static_cast<Eigen::Index>(samples));
  const std::size_t blocks = block_count(samples);
  std::optional<CosetSupport> centered;
  if (!dithered) centered.emplace(lat, Vector::Zero(n), sigma_s);
  parallel_blocks(blocks, opts.threads, [&](std::size_t b) {
    RngStream rng(opts.seed, b);
    const std::uint64_t start = static_cast<std::uint64_t>(b) * kBlockSize;
    const std::uint64_t m = block_items(b, samples);
    for (std::uint64_t i = 0; i < m; ++i) {
      Vector x;
      if (dithered) {
        const Vector t = sample_dither_continuous(sigma_s, n, rng);
        x = CosetSupport(lat, t, sigma_s).sample(rng);
      } else {
        x = centered->sample(rng);
      }
      draws.col(static_cast<Eigen::Index>(start + i)) = x;
    }
  });

  SamplingLemmaReport out;
  const int tests = n + 2;
  out.level = 0.01 / tests;
  bool pass = true;
  std::vector<double> column(samples);
  for (int i = 0; i < n; ++i) {
    for (std::uint64_t k = 0; k < samples; ++k) column[k] = draws(i, static_cast<Eigen::Index>(k));
    out.ks.push_back(ks_normal(column, sigma_s));
    pass = pass && out.ks.back().p_value > out.level;
  }

  // Radial test on deciles of chi^2(n).
  constexpr int kBins = 10;
  std::vector<double> edges;
  for (int j = 1; j < kBins; ++j) edges.push_back(chi_square_quantile(static_cast<double>(j) / kBins, n));
  std::vector<std::uint64_t> observed(kBins, 0);
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const double q = draws.col(static_cast<Eigen::Index>(k)).squaredNorm();
    sum.add(q);
    sum_sq.add(q * q);
    const double r = q / (sigma_s * sigma_s);
    const auto bin = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), r) - edges.begin());
    ++observed[bin];
  }
  out.radial = chi_square_gof(observed, std::vector<double>(kBins, 1.0 / kBins));
  pass = pass && out.radial.p_value > out.level;

  out.mean_power = mean_ci(sum.value(), sum_sq.value(), samples, opts.seed);
  const double se = (out.mean_power.hi - out.mean_power.p_hat) / normal_quantile(0.995);
  out.power_z = se > 0.0 ? (out.mean_power.p_hat - n * sigma_s * sigma_s) / se : 0.0;
  out.power_p = 2.0 * normal_q(std::abs(out.power_z));
  pass = pass && out.power_p > out.level;
  out.pass = pass;
  return out;
}

}  // namespace dps
