#pragma once

#include <cstdint>
#include <vector>

namespace dps {

// Two-sided 99% confidence level used throughout.
inline constexpr double kConfidence = 0.99;

// Point estimate with a two-sided confidence interval.
struct CIEstimate {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

// Clopper-Pearson interval for a binomial proportion.
CIEstimate proportion_ci(std::uint64_t successes, std::uint64_t trials, std::uint64_t seed = 0,
                         double confidence = kConfidence);

// Normal-approximation interval for a mean from its sum and sum of squares.
CIEstimate mean_ci(double sum, double sum_sq, std::uint64_t count, std::uint64_t seed = 0,
                   double confidence = kConfidence);

// Standard normal upper tail Q(x) and its inverse (via the complementary error function).
double normal_q(double x);
double normal_cdf(double x);
double normal_quantile(double p);

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// Two-sided one-sample Kolmogorov-Smirnov test against N(0, sigma^2); the data
// vector is sorted in place.
TestResult ks_normal(std::vector<double>& data, double sigma);

// Asymptotic Kolmogorov distribution: P(sqrt(n) D_n > x).
double kolmogorov_sf(double x);

// Pearson chi-square goodness of fit. expected holds probabilities; cells with
// small expected counts are pooled into their neighbours.
TestResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& expected_probs);

double chi_square_sf(double x, double dof);
double chi_square_quantile(double p, double dof);

// Order-statistic indices (0-based) bracketing the q-quantile of n samples at
// the given confidence; may fall outside [0, n).
struct QuantileBracket {
  std::int64_t lo_index = 0;
  std::int64_t hi_index = 0;
};
QuantileBracket quantile_bracket(std::uint64_t n, double q, double confidence = kConfidence);

}  // namespace dps
