#include <benchmark/benchmark.h>

#include "dps/gaussian_measures.hpp"
#include "dps/montecarlo.hpp"
#include "dps/sampler.hpp"

using namespace dps;

namespace {

void BM_GaussianMassA2(benchmark::State& state) {
  const Lattice a2 = Lattice::standard("A2");
  Vector shift(2);
  shift << 0.3, -0.2;
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_mass(a2, shift, 1.5));
}

void BM_GaussianMassD4(benchmark::State& state) {
  const Lattice d4 = Lattice::standard("D4");
  const Vector shift = Vector::Constant(4, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_mass(d4, shift, 1.2));
}

void BM_DiscreteGaussianBuild(benchmark::State& state) {
  const DiscreteGaussianSpec spec{Lattice::standard("D4"), Vector::Constant(4, 0.25), 1.2};
  for (auto _ : state) benchmark::DoNotOptimize(DiscreteGaussianSampler(spec));
}

void BM_DiscreteGaussianDraw(benchmark::State& state) {
  const DiscreteGaussianSampler sampler(DiscreteGaussianSpec{Lattice::standard("D4"), Vector::Constant(4, 0.25), 1.2});
  RngStream rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
}

void BM_SampleNormal(benchmark::State& state) {
  RngStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_normal(1.0, 8, rng));
}

void BM_VoronoiEscapeE8(benchmark::State& state) {
  const Lattice e8 = Lattice::standard("E8");
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(voronoi_escape(e8, 0.4, trials));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

}  // namespace

BENCHMARK(BM_GaussianMassA2);
BENCHMARK(BM_GaussianMassD4);
BENCHMARK(BM_DiscreteGaussianBuild);
BENCHMARK(BM_DiscreteGaussianDraw);
BENCHMARK(BM_SampleNormal);
BENCHMARK(BM_VoronoiEscapeE8)->Arg(10000)->Unit(benchmark::kMillisecond);
