#include <benchmark/benchmark.h>

#include "rfim/contour_enum.hpp"
#include "rfim/contours.hpp"
#include "rfim/metropolis.hpp"
#include "rfim/rng.hpp"
#include "rfim/triangles.hpp"

using namespace rfim;

namespace {

SpinConfiguration random_config(std::size_t n, double minus_rate, std::uint64_t seed) {
  const Volume v = Volume::centered(n);
  SplitMix64 rng(seed);
  std::vector<Spin> s(n, 1);
  for (auto& x : s)
    if (rng.uniform() < minus_rate) x = -1;
  return SpinConfiguration(v, std::move(s));
}

void BM_SpinsToTriangles(benchmark::State& state) {
  const auto sigma = random_config(static_cast<std::size_t>(state.range(0)), 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(spins_to_triangles(sigma));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpinsToTriangles)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_Contours(benchmark::State& state) {
  const auto fam = spins_to_triangles(random_config(static_cast<std::size_t>(state.range(0)), 0.05, 2));
  const SeparationConstant c = choose_C();
  for (auto _ : state) benchmark::DoNotOptimize(contours(fam, c));
  state.counters["triangles"] = static_cast<double>(fam.size());
}
BENCHMARK(BM_Contours)->RangeMultiplier(4)->Range(16, 1024);

void BM_MetropolisSweep(benchmark::State& state) {
  const CouplingSpec spec{0.55, 2.0, 1e-10};
  const Volume v = Volume::centered(static_cast<std::size_t>(state.range(0)));
  const EnergyModel model(spec, v);
  const auto h = DisorderField::generate(v, 0.5, FieldDistribution::bernoulli, 3);
  MetropolisChain chain(model, h.values, 0.5, 0.3, 1, 4);
  for (auto _ : state) chain.sweep();
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MetropolisSweep)->RangeMultiplier(4)->Range(64, 1024);

void BM_ExactMarginal(benchmark::State& state) {
  const CouplingSpec spec{0.55, 2.0, 1e-10};
  const Volume v = Volume::centered(static_cast<std::size_t>(state.range(0)));
  const auto h = DisorderField::generate(v, 0.5, FieldDistribution::bernoulli, 5);
  for (auto _ : state) benchmark::DoNotOptimize(exact_gibbs_marginal(spec, v, h, 0.5, 0.3, 0));
}
BENCHMARK(BM_ExactMarginal)->DenseRange(8, 14, 2);

void BM_EnumerateOriginContours(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_origin_contours(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_EnumerateOriginContours)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
