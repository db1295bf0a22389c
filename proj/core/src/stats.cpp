#include "dps/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "dps/error.hpp"

namespace dps {

CIEstimate proportion_ci(std::uint64_t successes, std::uint64_t trials, std::uint64_t seed, double confidence) {
  if (trials == 0) fail(ErrorCode::InvalidParams, "proportion needs at least one trial");
  if (successes > trials) fail(ErrorCode::InvalidParams, "successes exceed trials");
  const double alpha = 1.0 - confidence;
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  CIEstimate out;
  out.trials = trials;
  out.seed = seed;
  out.p_hat = k / n;
  out.lo = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1.0), alpha / 2);
  out.hi = successes == trials ? 1.0
                               : boost::math::quantile(boost::math::beta_distribution<>(k + 1.0, n - k), 1 - alpha / 2);
  return out;
}

CIEstimate mean_ci(double sum, double sum_sq, std::uint64_t count, std::uint64_t seed, double confidence) {
  if (count == 0) fail(ErrorCode::InvalidParams, "mean needs at least one sample");
  const auto n = static_cast<double>(count);
  CIEstimate out;
  out.trials = count;
  out.seed = seed;
  out.p_hat = sum / n;
  double se = 0.0;
  if (count > 1) {
    const double var = std::max(0.0, (sum_sq - n * out.p_hat * out.p_hat) / (n - 1.0));
    se = std::sqrt(var / n);
  }
  const double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
  out.lo = out.p_hat - z * se;
  out.hi = out.p_hat + z * se;
  return out;
}

double normal_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParams, "quantile needs p in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  // 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_normal(std::vector<double>& data, double sigma) {
  if (data.empty()) fail(ErrorCode::InvalidParams, "KS test needs data");
  std::sort(data.begin(), data.end());
  const auto n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double f = normal_cdf(data[i] / sigma);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  TestResult out;
  out.statistic = d;
  // Stephens' small-sample correction of the asymptotic distribution.
  const double root = std::sqrt(n);
  out.p_value = kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
  return out;
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<>(dof), x));
}

double chi_square_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::chi_squared_distribution<>(dof), p);
}

TestResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& expected_probs) {
  if (observed.size() != expected_probs.size() || observed.empty()) {
    fail(ErrorCode::DimensionMismatch, "observed and expected differ in size");
  }
  std::uint64_t total = 0;
  for (auto o : observed) total += o;
  if (total == 0) fail(ErrorCode::InvalidParams, "chi-square needs observations");
  const auto n = static_cast<double>(total);
  // Pool consecutive cells until each expected count reaches 5.
  std::vector<double> pooled_obs;
  std::vector<double> pooled_exp;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += static_cast<double>(observed[i]);
    acc_e += expected_probs[i] * n;
    if (acc_e >= 5.0) {
      pooled_obs.push_back(acc_o);
      pooled_exp.push_back(acc_e);
      acc_o = 0.0;
      acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (pooled_exp.empty()) {
      pooled_obs.push_back(acc_o);
      pooled_exp.push_back(acc_e);
    } else {
      pooled_obs.back() += acc_o;
      pooled_exp.back() += acc_e;
    }
  }
  TestResult out;
  for (std::size_t i = 0; i < pooled_obs.size(); ++i) {
    if (pooled_exp[i] <= 0.0) continue;
    const double diff = pooled_obs[i] - pooled_exp[i];
    out.statistic += diff * diff / pooled_exp[i];
  }
  const double dof = static_cast<double>(pooled_obs.size()) - 1.0;
  out.p_value = dof < 1.0 ? 1.0 : chi_square_sf(out.statistic, dof);
  return out;
}

QuantileBracket quantile_bracket(std::uint64_t n, double q, double confidence) {
  const double alpha = 1.0 - confidence;
  boost::math::binomial_distribution<> dist(static_cast<double>(n), q);
  // Number of samples below the q-quantile is Binomial(n, q).
  const double lo = boost::math::quantile(dist, alpha / 2);
  const double hi = boost::math::quantile(boost::math::complement(dist, alpha / 2));
  QuantileBracket out;
  out.lo_index = static_cast<std::int64_t>(std::floor(lo)) - 1;
  out.hi_index = static_cast<std::int64_t>(std::ceil(hi));
  return out;
}

}  // namespace dps
