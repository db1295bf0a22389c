#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "dps/rng.hpp"

namespace dps {

// Seed and worker count for Monte Carlo runs. Work is split into fixed-size
// blocks, block b draws from RngStream(seed, b) and results are merged in
// block order, so outputs do not depend on the number of threads.
struct RunOptions {
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
};

inline constexpr std::uint64_t kBlockSize = 1024;

inline std::size_t block_count(std::uint64_t items, std::uint64_t block = kBlockSize) {
  return static_cast<std::size_t>((items + block - 1) / block);
}

// Calls fn(b) for every block index b in [0, blocks).
template <class Fn>
void parallel_blocks(std::size_t blocks, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || blocks <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::min(workers, blocks));
  for (std::size_t i = 0; i < std::min(workers, blocks); ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dps
