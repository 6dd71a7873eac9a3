#include <vector>

#include <benchmark/benchmark.h>

#include "ecggin/gin.hpp"
#include "ecggin/synthetic.hpp"
#include "ecggin/train.hpp"
#include "ecggin/transforms.hpp"

namespace {

using namespace ecggin;

struct Fixture {
  gin::GinModel model;
  std::vector<gin::PreparedGraph> graphs;
  gin::GraphBatch batch;
};

Fixture make_fixture(int hidden, std::size_t graphs) {
  gin::GinConfig c;
  c.hidden_dim = hidden;
  const auto beats = synthetic::make_beat_corpus(graphs / 2, 3);
  TransformOptions t;
  const GraphCorpus corpus = transform_beats(beats, t);
  Fixture f{gin::GinModel(c), gin::prepare(corpus), {}};
  f.batch = gin::make_batch(f.graphs, c.readout);
  return f;
}

void BM_MakeBatch(benchmark::State& state) {
  Fixture f = make_fixture(64, 64);
  for (auto _ : state) benchmark::DoNotOptimize(gin::make_batch(f.graphs, gin::Readout::sum));
}
BENCHMARK(BM_MakeBatch);

void BM_ForwardInference(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<int>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(gin::forward(f.model, f.batch, gin::Mode::inference));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ForwardInference)->Arg(16)->Arg(64);

void BM_BackwardTraining(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<int>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(gin::backward(f.model, f.batch, gin::Mode::training));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_BackwardTraining)->Arg(16)->Arg(64);

void BM_TrainEpoch(benchmark::State& state) {
  Fixture f = make_fixture(64, 256);
  gin::TrainConfig tc;
  tc.epochs = 1;
  std::vector<std::size_t> all(f.graphs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(gin::train(f.model, f.graphs, all, tc));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(all.size()));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
