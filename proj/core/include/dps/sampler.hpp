#pragma once

#include <memory>

#include "dps/gaussian_measures.hpp"
#include "dps/lattice.hpp"
#include "dps/rng.hpp"

namespace dps {

inline constexpr double kDefaultSamplerTail = 1e-12;

// n independent N(0, sigma^2) draws.
Vector sample_normal(double sigma, int n, RngStream& rng);

// D_{Lambda + shift, sigma} with truncation tail bound `tail`.
struct DiscreteGaussianSpec {
  Lattice lattice;
  Vector shift;
  double sigma = 1.0;
  double tail = kDefaultSamplerTail;
};

// Inverse-CDF sampler over the enumerated, mass-sorted support. Building it is
// the expensive part; sampling is a binary search per draw (per coordinate for
// diagonal lattices).
class DiscreteGaussianSampler {
 public:
  explicit DiscreteGaussianSampler(const DiscreteGaussianSpec& spec, std::size_t cap = kDefaultEnumerationCap);

  Vector sample(RngStream& rng) const { return support_.sample(rng); }
  const CosetSupport& support() const { return support_; }

 private:
  CosetSupport support_;
};

// One draw from D_{Lambda + shift, sigma}.
Vector sample_discrete_gaussian(const DiscreteGaussianSpec& spec, RngStream& rng);

// T ~ N(0, sigma_s^2 I); when `reduce_mod` is given the draw is reduced into
// its Voronoi cell (same coset of the lattice).
Vector sample_dither_continuous(double sigma_s, int n, RngStream& rng, const Lattice* reduce_mod = nullptr);

// T ~ D_{fine, sigma_s}, returned as T mod coarse. Requires coarse to be a
// sublattice of fine (NotNested otherwise).
class DiscreteDither {
 public:
  DiscreteDither(const Lattice& coarse, const Lattice& fine, double sigma_s);

  Vector sample(RngStream& rng) const;
  const Lattice& coarse() const { return coarse_; }
  const Lattice& fine() const { return fine_; }
  double sigma() const { return sigma_; }

 private:
  Lattice coarse_;
  Lattice fine_;
  double sigma_;
  std::shared_ptr<const DiscreteGaussianSampler> sampler_;
};

Vector sample_dither_discrete(const Lattice& coarse, const Lattice& fine, double sigma_s, RngStream& rng);

}  // namespace dps
