#include <benchmark/benchmark.h>

#include "dps/lattice.hpp"
#include "dps/rng.hpp"
#include "dps/sampler.hpp"

using namespace dps;

namespace {

void closest_point_bench(benchmark::State& state, const Lattice& lattice) {
  RngStream rng(1);
  std::vector<Vector> targets;
  for (int i = 0; i < 1024; ++i) targets.push_back(sample_normal(2.0, lattice.dim(), rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(closest_point(lattice, targets[i++ & 1023]));
  }
}

void BM_ClosestPointE8Fast(benchmark::State& state) { closest_point_bench(state, Lattice::standard("E8")); }

void BM_ClosestPointE8Generic(benchmark::State& state) {
  closest_point_bench(state, new_lattice(Lattice::standard("E8").basis()));
}

void BM_ClosestPointD4Fast(benchmark::State& state) { closest_point_bench(state, Lattice::standard("D4")); }

void BM_ClosestPointA2Generic(benchmark::State& state) { closest_point_bench(state, Lattice::standard("A2")); }

void BM_EnumerateCoset(benchmark::State& state) {
  const Lattice d4 = Lattice::standard("D4");
  const Vector shift = Vector::Constant(4, 0.25);
  const double radius = static_cast<double>(state.range(0));
  std::size_t points = 0;
  for (auto _ : state) {
    points = enumerate_coset(d4, shift, radius).size();
    benchmark::DoNotOptimize(points);
  }
  state.counters["points"] = static_cast<double>(points);
}

}  // namespace

BENCHMARK(BM_ClosestPointE8Fast);
BENCHMARK(BM_ClosestPointE8Generic);
BENCHMARK(BM_ClosestPointD4Fast);
BENCHMARK(BM_ClosestPointA2Generic);
BENCHMARK(BM_EnumerateCoset)->Arg(2)->Arg(4)->Arg(6);
