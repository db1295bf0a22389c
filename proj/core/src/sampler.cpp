#include "dps/sampler.hpp"

#include <cmath>

#include "dps/error.hpp"

namespace dps {

Vector sample_normal(double sigma, int n, RngStream& rng) {
  if (!(sigma > 0.0)) fail(ErrorCode::NonPositive, "sigma must be positive");
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = sigma * rng.normal();
  return x;
}

DiscreteGaussianSampler::DiscreteGaussianSampler(const DiscreteGaussianSpec& spec, std::size_t cap)
    : support_(spec.lattice, spec.shift, spec.sigma, spec.tail, cap) {}

Vector sample_discrete_gaussian(const DiscreteGaussianSpec& spec, RngStream& rng) {
  return DiscreteGaussianSampler(spec).sample(rng);
}

Vector sample_dither_continuous(double sigma_s, int n, RngStream& rng, const Lattice* reduce_mod) {
  Vector t = sample_normal(sigma_s, n, rng);
  if (reduce_mod != nullptr) t = mod_lattice(*reduce_mod, t);
  return t;
}

DiscreteDither::DiscreteDither(const Lattice& coarse, const Lattice& fine, double sigma_s)
    : coarse_(coarse), fine_(fine), sigma_(sigma_s) {
  if (coarse.dim() != fine.dim()) fail(ErrorCode::DimensionMismatch, "lattices differ in dimension");
  if (!fine.contains_lattice(coarse, 1e-9)) fail(ErrorCode::NotNested, "coarse lattice is not contained in fine lattice");
  DiscreteGaussianSpec spec{fine, Vector::Zero(fine.dim()), sigma_s, kDefaultSamplerTail};
  sampler_ = std::make_shared<const DiscreteGaussianSampler>(spec);
}

Vector DiscreteDither::sample(RngStream& rng) const { return mod_lattice(coarse_, sampler_->sample(rng)); }

Vector sample_dither_discrete(const Lattice& coarse, const Lattice& fine, double sigma_s, RngStream& rng) {
  return DiscreteDither(coarse, fine, sigma_s).sample(rng);
}

}  // namespace dps
