#include "dps/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "dps/analysis.hpp"
#include "dps/codec.hpp"
#include "dps/error.hpp"
#include "dps/gaussian_measures.hpp"
#include "dps/montecarlo.hpp"
#include "dps/sampler.hpp"
#include "dps/stats.hpp"

namespace dps {
namespace {

using Key = std::vector<std::int64_t>;

Key key_of(const IntVector& coords) { return Key(coords.data(), coords.data() + coords.size()); }

std::string format(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void add_check(SuiteResult& r, std::string label, double value, double bound, bool pass, std::string detail) {
  r.checks.push_back(SuiteCheck{std::move(label), value, bound, pass, std::move(detail)});
}

void finish(SuiteResult& r) {
  r.pass = !r.checks.empty();
  for (const auto& c : r.checks) r.pass = r.pass && c.pass;
}

std::vector<Lattice> lattices_or(const SuiteOptions& o, std::vector<Lattice> defaults) {
  if (o.lattice) return {*o.lattice};
  return defaults;
}

std::uint64_t or_default(std::uint64_t v, std::uint64_t fallback) { return v > 0 ? v : fallback; }

Lattice integer_lattice(int n) { return Lattice::standard("Z" + std::to_string(n)); }

// Codec at unit signal power scaled so the coding lattice has escape
// probability epsilon under the effective noise.
Codec normalized_codec(const Lattice& lat, double snr, double epsilon, DitherMode dither, const RunOptions& run) {
  const ChannelParams params = channel_params_from_snr(snr, 1.0);
  const double err_inv =
      inverse_error_function(lat, epsilon, kDefaultErrInvTrials, kDefaultErrInvTol,
                             RunOptions{derive_seed(run.seed, 7), run.threads})
          .value;
  return Codec(CodecConfig{lat, normalize_scale(params, err_inv), params, std::move(dither), PeakOff{}});
}

SuiteResult sampling_lemma(const SuiteOptions& o) {
  SuiteResult r;
  const double sigma = o.sigma_s.value_or(1.0);
  const std::uint64_t n = or_default(o.trials, 100000);
  for (const auto& lat : lattices_or(o, {integer_lattice(4), Lattice::standard("A2")})) {
    const SamplingLemmaReport rep = sampling_lemma_suite(lat, sigma, n, o.run, true);
    for (std::size_t i = 0; i < rep.ks.size(); ++i) {
      add_check(r, lat.name() + " KS coordinate " + std::to_string(i), rep.ks[i].p_value, rep.level,
                rep.ks[i].p_value > rep.level, "p-value > level, D = " + format(rep.ks[i].statistic));
    }
    add_check(r, lat.name() + " radial chi-square", rep.radial.p_value, rep.level, rep.radial.p_value > rep.level,
              "p-value > level, statistic = " + format(rep.radial.statistic));
    add_check(r, lat.name() + " mean power z", std::abs(rep.power_z), 3.0, std::abs(rep.power_z) <= 3.0,
              "|mean |X|^2 - n sigma^2| / SE <= 3, mean = " + format(rep.mean_power.p_hat));
  }
  finish(r);
  return r;
}

SuiteResult discrete_sampling_lemma(const SuiteOptions& o) {
  SuiteResult r;
  const double sigma = o.sigma_s.value_or(2.0);
  const std::uint64_t n = or_default(o.trials, 100000);
  const std::vector<std::pair<Lattice, Lattice>> pairs = {
      {integer_lattice(1).scaled(2.0), integer_lattice(1)},
      {integer_lattice(2), integer_lattice(2).scaled(0.5)}};
  for (const auto& [coarse, fine] : pairs) {
    const DiscreteDither dither(coarse, fine, sigma);
    const int dim = fine.dim();
    const std::size_t blocks = block_count(n);
    std::vector<std::map<Key, std::uint64_t>> counts(blocks);
    parallel_blocks(blocks, o.run.threads, [&](std::size_t b) {
      RngStream rng(o.run.seed, b);
      std::map<Key, CosetSupport> supports;
      const std::uint64_t m = std::min<std::uint64_t>(kBlockSize, n - b * kBlockSize);
      for (std::uint64_t i = 0; i < m; ++i) {
        const Vector t = dither.sample(rng);
        const Key k = key_of(fine.coords_of(t));
        auto it = supports.find(k);
        if (it == supports.end()) it = supports.emplace(k, CosetSupport(coarse, t, sigma)).first;
        ++counts[b][key_of(fine.coords_of(it->second.sample(rng)))];
      }
    });
    std::map<Key, std::uint64_t> total;
    for (const auto& c : counts) {
      for (const auto& [k, v] : c) total[k] += v;
    }
    // Exact pmf of D_{fine, sigma} over a ball carrying all but a negligible mass.
    auto points = enumerate_coset(fine, Vector::Zero(dim), sigma * (std::sqrt(dim) + 9.0));
    // Most likely cells first so that pooling merges the tail.
    std::stable_sort(points.begin(), points.end(),
                     [](const CosetPoint& a, const CosetPoint& b) { return a.norm2 < b.norm2; });
    std::vector<double> weights;
    std::vector<std::uint64_t> observed;
    double norm = 0.0;
    std::uint64_t matched = 0;
    for (const auto& p : points) {
      weights.push_back(std::exp(-p.norm2 / (2.0 * sigma * sigma)));
      norm += weights.back();
      const auto it = total.find(key_of(p.coords));
      observed.push_back(it == total.end() ? 0 : it->second);
      matched += observed.back();
    }
    for (auto& w : weights) w /= norm;
    if (matched < n) {
      observed.push_back(n - matched);
      weights.push_back(1e-300);
    }
    const TestResult t = chi_square_gof(observed, weights);
    add_check(r, "(" + coarse.name() + ", " + fine.name() + ") pmf chi-square", t.p_value, 1e-3, t.p_value > 1e-3,
              "p-value > 0.001, statistic = " + format(t.statistic));
  }
  finish(r);
  return r;
}

SuiteResult negative_moment(const SuiteOptions& o) {
  SuiteResult r;
  const double sigma = o.sigma_s.value_or(1.0);
  const std::uint64_t dithers = or_default(o.dithers, 10000);
  for (const auto& lat : lattices_or(o, {integer_lattice(1), integer_lattice(1).scaled(2.0),
                                         Lattice::standard("A2")})) {
    const CIEstimate ci = negative_moment_check(lat, sigma, dithers, o.run);
    const double v = lat.volume();
    // 1/f is nearly constant on smooth lattices; allow for rounding in the sums.
    const double slack = 1e-9 * v;
    add_check(r, lat.name() + " E[1/f]", ci.p_hat, v, ci.lo - slack <= v && v <= ci.hi + slack,
              "99% CI [" + format(ci.lo) + ", " + format(ci.hi) + "] covers the volume");
  }
  finish(r);
  return r;
}

SuiteResult chernoff(const SuiteOptions& o) {
  SuiteResult r;
  const double sigma = o.sigma_s.value_or(1.0);
  const double eps = o.epsilon.value_or(0.9);
  const std::uint64_t dithers = or_default(o.dithers, 2000);
  for (const auto& lat : lattices_or(o, {integer_lattice(4), integer_lattice(8)})) {
    const ChernoffReport rep = chernoff_power_check(lat, sigma, eps, dithers, o.run);
    add_check(r, lat.name() + " upper tail", rep.upper_tail.p_hat, rep.upper_bound,
              rep.upper_tail.lo <= rep.upper_bound, "99% lower confidence bound <= bound");
    add_check(r, lat.name() + " lower tail", rep.lower_tail.p_hat, rep.lower_bound,
              rep.lower_tail.lo <= rep.lower_bound, "99% lower confidence bound <= bound");
  }
  finish(r);
  return r;
}

// Coordinate tails of X and norm tails of the effective noise. The law of X
// under a continuous dither does not depend on the lattice scale, so a coarse
// scale keeps the supports small.
SuiteResult tail_bounds(const SuiteOptions& o) {
  SuiteResult r;
  const double snr = o.snr.value_or(1.0);
  const ChannelParams params = channel_params_from_snr(snr, 1.0);
  const std::uint64_t dithers = or_default(o.dithers, 200);
  const std::uint64_t per = or_default(o.trials, 50);
  const std::vector<double> ts = {1.0, 2.0, 3.0};
  const std::vector<double> epss = {0.3, 0.5};
  for (const auto& lat : lattices_or(o, {Lattice::standard("E8"), integer_lattice(8), integer_lattice(16)})) {
    const int n = lat.dim();
    const Lattice coding = lat.scaled(3.0);
    struct Counts {
      std::vector<std::uint64_t> coord;
      std::vector<std::uint64_t> norm;
    };
    std::vector<Counts> counts(dithers);
    parallel_blocks(dithers, o.run.threads, [&](std::size_t d) {
      RngStream rng(o.run.seed, d);
      Counts c{std::vector<std::uint64_t>(ts.size(), 0), std::vector<std::uint64_t>(epss.size(), 0)};
      const Vector t = sample_dither_continuous(params.sigma_s(), n, rng);
      const CosetSupport support(coding, t, params.sigma_s());
      for (std::uint64_t i = 0; i < per; ++i) {
        const Vector x = support.sample(rng);
        const Vector w = sample_normal(params.sigma_w(), n, rng);
        for (std::size_t j = 0; j < ts.size(); ++j) {
          for (int k = 0; k < n; ++k) {
            if (std::abs(x(k)) > ts[j] * params.sigma_s()) ++c.coord[j];
          }
        }
        const double w_eff = ((params.alpha - 1.0) * x + params.alpha * w).norm();
        for (std::size_t j = 0; j < epss.size(); ++j) {
          if (w_eff > std::sqrt((1.0 + epss[j]) * n) * params.sigma_eff()) ++c.norm[j];
        }
      }
      counts[d] = std::move(c);
    });
    const std::uint64_t samples = dithers * per;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      std::uint64_t k = 0;
      for (const auto& c : counts) k += c.coord[j];
      const CIEstimate ci = proportion_ci(k, samples * n, o.run.seed);
      const double bound = 2.0 * std::exp(-0.5 * ts[j] * ts[j]);
      add_check(r, lat.name() + " Pr[|X_i| > " + format(ts[j]) + " sigma_s]", ci.p_hat, bound, ci.lo <= bound,
                "99% lower confidence bound <= 2 exp(-t^2 / 2)");
    }
    for (std::size_t j = 0; j < epss.size(); ++j) {
      std::uint64_t k = 0;
      for (const auto& c : counts) k += c.norm[j];
      const CIEstimate ci = proportion_ci(k, samples, o.run.seed);
      const double e = epss[j];
      const double bound = std::exp(-0.25 * n * (e * e - e * e * e));
      add_check(r, lat.name() + " Pr[|W_eff| > sqrt((1 + " + format(e) + ") n) sigma_eff]", ci.p_hat, bound,
                ci.lo <= bound, "99% lower confidence bound <= exp(-(n / 4)(eps^2 - eps^3))");
    }
  }
  finish(r);
  return r;
}

SuiteResult markov(const SuiteOptions& o) {
  SuiteResult r;
  const double eps = o.epsilon.value_or(0.05);
  const double snr = o.snr.value_or(1.0);
  const std::uint64_t dithers = or_default(o.dithers, 500);
  const std::uint64_t per = or_default(o.trials, 2000);
  const std::vector<double> gammas = {2.0, 6.0};
  for (const auto& lat : lattices_or(o, {integer_lattice(2)})) {
    const Codec codec = normalized_codec(lat, snr, eps, DitherContinuous{}, o.run);
    std::vector<std::uint64_t> errors(dithers, 0);
    parallel_blocks(dithers, o.run.threads, [&](std::size_t d) {
      RngStream rng(o.run.seed, d);
      const Vector t = codec.draw_dither(rng);
      const DiscreteGaussianSampler sampler = codec.coding_sampler(t);
      std::uint64_t k = 0;
      for (std::uint64_t i = 0; i < per; ++i) {
        if (codec.trial(sampler, t, rng).error) ++k;
      }
      errors[d] = k;
    });
    std::uint64_t total = 0;
    for (auto e : errors) total += e;
    const CIEstimate avg = proportion_ci(total, dithers * per, o.run.seed);
    add_check(r, lat.name() + " average error", avg.p_hat, eps, true,
              "informational; the scale comes from an estimated inverse error function");
    for (double g : gammas) {
      std::uint64_t bad = 0;
      for (auto e : errors) {
        if (static_cast<double>(e) >= g * eps * static_cast<double>(per)) ++bad;
      }
      const CIEstimate frac = proportion_ci(bad, dithers, o.run.seed);
      add_check(r, lat.name() + " Pr_T[P_e(T) >= " + format(g) + " eps]", frac.p_hat, 1.0 / g, frac.lo <= 1.0 / g,
                "99% lower confidence bound <= 1 / gamma");
    }
  }
  finish(r);
  return r;
}

SuiteResult converse(const SuiteOptions& o) {
  SuiteResult r;
  const double sigma_s = o.sigma_s.value_or(1.0);
  const double snr = o.snr.value_or(0.25);
  const double sigma_w = sigma_s / std::sqrt(snr);
  const std::uint64_t trials = or_default(o.trials, 100000);
  for (const auto& lat : lattices_or(o, {integer_lattice(1)})) {
    const ConverseReport rep = converse_experiment(lat, sigma_s, sigma_w, trials, o.run);
    add_check(r, lat.name() + " entropy rate", rep.entropy_rate, rep.entropy_upper, rep.pass_entropy,
              "H / n <= -(1/n) log P0 + pi (1 - P0) + 1.8 exp(-1.7 n) / n, P0 = " + format(rep.p0));
    add_check(r, lat.name() + " error probability", rep.p_err.hi, rep.half_gap, rep.pass_error,
              rep.applies ? "99% upper confidence bound >= (1 - P0) / 2" : "snr >= 1, bound not applicable");
  }
  finish(r);
  return r;
}

SuiteResult achievability(const SuiteOptions& o) {
  SuiteResult r;
  const double eps = o.epsilon.value_or(0.05);
  const double snr = o.snr.value_or(1.0);
  const std::uint64_t dithers = or_default(o.dithers, 100);
  const std::uint64_t per = or_default(o.trials, 2000);
  for (const auto& lat : lattices_or(o, {Lattice::standard("E8")})) {
    const Theorem1Report rep = theorem1_audit(lat, snr, eps, dithers, per, o.run);
    std::uint64_t ok[4] = {0, 0, 0, 0};
    for (const auto& a : rep.audits) {
      ok[0] += a.pass_error;
      ok[1] += a.pass_power_upper;
      ok[2] += a.pass_mass;
      ok[3] += a.pass_rate;
    }
    const char* names[4] = {"error <= 6 eps", "power <= 1 + 4 / sqrt(n)", "mass >= exp(-4) / V",
                            "rate >= C - gap"};
    for (int i = 0; i < 4; ++i) {
      add_check(r, lat.name() + " dithers with " + names[i], static_cast<double>(ok[i]) / rep.dithers, 0.0, true,
                "informational");
    }
    add_check(r, lat.name() + " fraction passing all events", rep.pass_fraction, rep.threshold, rep.pass,
              "fraction >= 1/2 - 3 binomial SE; gamma = " + format(rep.gamma) + ", scale = " + format(rep.scale));
  }
  finish(r);
  return r;
}

SuiteResult genie(const SuiteOptions& o) {
  SuiteResult r;
  const double eps = o.epsilon.value_or(0.05);
  const double snr = o.snr.value_or(1.0);
  const std::uint64_t dithers = or_default(o.dithers, 1000);
  const std::uint64_t per = or_default(o.trials, 100);
  for (const auto& lat : lattices_or(o, {integer_lattice(4), Lattice::standard("E8")})) {
    const Codec codec = normalized_codec(lat, snr, eps, DitherContinuous{}, o.run);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> tally(dithers);
    parallel_blocks(dithers, o.run.threads, [&](std::size_t d) {
      RngStream rng(o.run.seed, d);
      const Vector t = codec.draw_dither(rng);
      const DiscreteGaussianSampler sampler = codec.coding_sampler(t);
      std::uint64_t mismatches = 0;
      std::uint64_t errors = 0;
      for (std::uint64_t i = 0; i < per; ++i) {
        const TransmissionRecord rec = codec.trial(sampler, t, rng);
        errors += rec.error;
        mismatches += rec.error != rec.effective_escape;
      }
      tally[d] = {mismatches, errors};
    });
    std::uint64_t mismatches = 0;
    std::uint64_t errors = 0;
    for (const auto& [m, e] : tally) {
      mismatches += m;
      errors += e;
    }
    add_check(r, lat.name() + " error / escape mismatches", static_cast<double>(mismatches), 0.0, mismatches == 0,
              "exact agreement over " + std::to_string(dithers * per) + " trials, " + std::to_string(errors) +
                  " errors");
  }
  finish(r);
  return r;
}

const std::map<std::string, std::function<SuiteResult(const SuiteOptions&)>>& registry() {
  static const std::map<std::string, std::function<SuiteResult(const SuiteOptions&)>> r = {
      {"sampling-lemma", sampling_lemma},
      {"discrete-sampling-lemma", discrete_sampling_lemma},
      {"negative-moment", negative_moment},
      {"chernoff", chernoff},
      {"tail-bounds", tail_bounds},
      {"markov", markov},
      {"converse", converse},
      {"theorem1", achievability},
      {"genie", genie}};
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"sampling-lemma", "discrete-sampling-lemma", "negative-moment",
                                                 "chernoff",       "tail-bounds",             "markov",
                                                 "converse",       "theorem1",                "genie"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) fail(ErrorCode::UsageError, "unknown suite '" + name + "'");
  SuiteResult r = it->second(options);
  r.name = name;
  r.seed = options.run.seed;
  return r;
}

}  // namespace dps
