#include <benchmark/benchmark.h>

#include <map>
#include <span>

#include "melseg/evalharness.hpp"

using namespace melseg;

namespace {

const Corpus& bench_corpus() {
  static const Corpus corpus = [] {
    SynthSpec spec;
    spec.melodies = 40;
    return generate_synthetic_corpus(spec, 77);
  }();
  return corpus;
}

const RbmModel& bench_model(int n) {
  static std::map<int, RbmModel> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    TrainConfig cfg;
    cfg.epochs = 3;
    const auto batch = encode_corpus(bench_corpus(), n, {}, 1);
    it = cache.emplace(n, train_fpcd(batch, cfg, 64).model).first;
  }
  return it->second;
}

// One conditional-probability estimate for the last note of an n-gram.
void BM_ConditionalNoteProb(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SamplerConfig cfg{static_cast<int>(state.range(1)), static_cast<int>(state.range(1)), 3};
  const auto& model = bench_model(n);
  const auto batch = encode_melody(bench_corpus().melodies.front(), n, model.viewpoints, 1);
  const auto row = batch.rows.row(batch.rows.rows() - 1);
  const std::span<const std::uint8_t> bits(row.data(), static_cast<std::size_t>(row.size()));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(conditional_note_prob(model, bits, n, cfg, stream++));
  }
}
BENCHMARK(BM_ConditionalNoteProb)->Args({3, 50})->Args({3, 150})->Args({10, 50})
    ->Unit(benchmark::kMicrosecond);

void BM_EstimateProbSmall(benchmark::State& state) {
  RbmModel model = RbmModel::random(6, 4, 9, 1.0);
  const SamplerConfig cfg{static_cast<int>(state.range(0)), 200, 1};
  Eigen::VectorXd v(6);
  v << 1, 0, 1, 1, 0, 0;
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_prob(model, v, cfg, stream++));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_EstimateProbSmall)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

// One FPCD epoch over the encoded corpus.
void BM_TrainEpoch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto batch = encode_corpus(bench_corpus(), n, {}, 1);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_fpcd(batch, cfg, static_cast<int>(state.range(1))).model.W.sum());
  }
  state.SetItemsProcessed(state.iterations() * batch.rows.rows());
}
BENCHMARK(BM_TrainEpoch)->Args({3, 64})->Args({3, 200})->Args({10, 200})
    ->Unit(benchmark::kMillisecond);

void BM_FinetuneEpoch(benchmark::State& state) {
  const int n = 3;
  const auto batch = encode_corpus(bench_corpus(), n, {}, 1);
  const auto net = ffnn_from_rbm(bench_model(n), 5);
  std::vector<double> targets(static_cast<std::size_t>(batch.rows.rows()));
  for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = static_cast<double>(i % 7);
  FinetuneConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(finetune(net, batch.rows, targets, cfg).log.mse.back());
}
BENCHMARK(BM_FinetuneEpoch)->Unit(benchmark::kMillisecond);

void BM_PickBoundaries(benchmark::State& state) {
  Bsp bsp{"b", std::vector<double>(static_cast<std::size_t>(state.range(0)))};
  for (std::size_t i = 0; i < bsp.values.size(); ++i) {
    bsp.values[i] = 1.0 + static_cast<double>((i * 2654435761U) % 97) / 10.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(pick_boundaries(bsp, {0.8}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PickBoundaries)->Range(16, 1024)->Complexity();

}  // namespace

BENCHMARK_MAIN();
