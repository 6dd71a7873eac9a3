#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ecggin/synthetic.hpp"
#include "ecggin/transforms.hpp"

namespace {

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<double> beat() {
  return ecggin::synthetic::make_beat_corpus(1, 7).front().samples;
}

void BM_NvgFast(benchmark::State& state) {
  const auto v = uniform(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ecggin::nvg_fast(v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NvgFast)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_NvgNaive(benchmark::State& state) {
  const auto v = uniform(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ecggin::nvg_naive(v));
}
BENCHMARK(BM_NvgNaive)->RangeMultiplier(4)->Range(64, 1024);

void BM_Hvg(benchmark::State& state) {
  const auto v = uniform(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ecggin::hvg_transform(v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hvg)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_Qg(benchmark::State& state) {
  const auto v = uniform(4096, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ecggin::qg_transform(v, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Qg)->Arg(2)->Arg(24)->Arg(128);

void BM_BeatToFeaturedNvg(benchmark::State& state) {
  const auto b = beat();
  ecggin::TransformOptions opt;
  for (auto _ : state) benchmark::DoNotOptimize(ecggin::transform_series(b, opt));
}
BENCHMARK(BM_BeatToFeaturedNvg);

}  // namespace
