#pragma once

#include <cstdint>
#include <random>

namespace dps {

inline constexpr std::uint64_t kDefaultSeed = 20180516;

// SplitMix64 finalizer applied to seed + tag; used to derive independent
// sub-seeds for nested experiments.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded random stream. The engine is a 64-bit Mersenne twister initialised
// from (seed, stream_id) through std::seed_seq, so identical (seed, stream_id)
// pairs reproduce the same draws and distinct stream ids give unrelated
// sequences. Conversions to uniform/normal variates are done here rather than
// with <random> distributions, whose algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = kDefaultSeed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  // Standard normal variate (Marsaglia polar method).
  double normal();
  // Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dps
