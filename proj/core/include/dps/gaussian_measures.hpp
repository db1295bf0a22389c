#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dps/lattice.hpp"
#include "dps/rng.hpp"

namespace dps {

inline constexpr double kDefaultThetaTol = 1e-12;

// Truncated Gaussian mass of a coset, sum of f_sigma(x) over x in Lambda + t.
struct ThetaSum {
  double value = 0.0;
  double log_value = 0.0;          // log(value), finite even when value underflows
  double truncation_radius = 0.0;  // largest norm included (per coordinate for factorized sums)
  double tail_bound = 0.0;         // certified relative bound on the omitted mass
};

struct FlatnessBracket {
  double lower = 0.0;  // max of |V f(Lambda + x) - 1| over sampled x
  double upper = 0.0;  // sum over nonzero dual vectors of exp(-2 pi^2 sigma^2 |y|^2)
  double sigma = 0.0;
};

struct SmoothingResult {
  double s = 0.0;
  double epsilon = 0.0;
  double residual = 0.0;  // |g(s) - epsilon|
  int iterations = 0;
};

struct MeanCheckReport {
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;  // (2 pi sigma^2)^{-n/2} + 1 / V
  int trials = 0;
  std::uint64_t seed = 0;
};

// Isotropic normal density with standard deviation sigma.
double gaussian_pdf(double sigma, const Vector& x);

ThetaSum gaussian_mass(const Lattice& lattice, const Vector& shift, double sigma,
                       double rel_tol = kDefaultThetaTol, std::size_t cap = kDefaultEnumerationCap);

// Probability of the origin under the centered discrete Gaussian.
double mass_zero(const Lattice& lattice, double sigma);

// Entropy in nats, computed from the mass and second moment and cross-checked
// against -sum p log p over the support. Throws InternalMismatch when the two
// differ by more than tol.
double entropy_exact(const Lattice& lattice, const Vector& shift, double sigma, double tol = 1e-9);

// g(s) = sum over nonzero x in Lambda of exp(-|s x|^2 / 2), certified.
double smoothing_sum(const Lattice& lattice, double s);

// Upper side of the flatness bracket alone (no sampling).
double flatness_upper(const Lattice& lattice, double sigma);

FlatnessBracket flatness_factor(const Lattice& lattice, double sigma, int samples = 64,
                                std::uint64_t seed = kDefaultSeed);

// Solves smoothing_sum(lattice, s) = epsilon. Throws BracketFailure.
SmoothingResult smoothing_parameter(const Lattice& lattice, double epsilon);

// Mean of f_sigma over random Construction-A lattices (k = n - 1, p = 1009)
// rescaled to volume V; for n = 1 the ensemble is the single lattice V Z.
MeanCheckReport random_lattice_mean_check(int n, double volume, int trials, double sigma,
                                          std::uint64_t seed = kDefaultSeed);

// Enumerated support of the discrete Gaussian on Lambda + t, truncated so the
// omitted relative mass is at most rel_tail. Diagonal lattices are stored per
// coordinate (the distribution is a product); everything else is stored as an
// explicit point list.
class CosetSupport {
 public:
  CosetSupport(const Lattice& lattice, const Vector& shift, double sigma,
               double rel_tail = kDefaultThetaTol, std::size_t cap = kDefaultEnumerationCap);

  int dim() const { return dim_; }
  double sigma() const { return sigma_; }
  bool factorized() const { return !axes_.empty(); }
  std::size_t size() const;
  double truncation_radius() const { return radius_; }
  double tail_bound() const { return tail_; }

  // Normalized mass f_sigma(Lambda + t) over the truncated support.
  double mass() const;
  double log_mass() const;
  double mean_sq_norm() const;
  // log((2 pi sigma^2)^{n/2} f) + E|X|^2 / (2 sigma^2)
  double entropy() const;
  // -sum p log p
  double entropy_direct() const;

  Vector sample(RngStream& rng) const;

  // Explicit support (non-factorized only): columns are points, probabilities
  // sorted in decreasing order.
  const Matrix& points() const { return points_; }
  const std::vector<double>& probabilities() const { return probs_; }

 private:

  int dim_ = 0;
  double sigma_ = 0.0;
  double radius_ = 0.0;
  double tail_ = 0.0;
  // log of sum exp(-|x|^2 / 2 sigma^2) over the support
  double log_rho_ = 0.0;
  // sum of relative weights other than the leading point
  double rest_ = 0.0;
  Matrix points_;
  std::vector<double> norms2_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::vector<CosetSupport> axes_;
};

}  // namespace dps
