#include <benchmark/benchmark.h>

#include <map>

#include "binet/baselines.hpp"
#include "binet/binet_model.hpp"
#include "binet/nn/layers.hpp"
#include "binet/process_generator.hpp"
#include "binet/thresholding.hpp"

using namespace binet;

namespace {

nn::Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  nn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * uniform01(rng) - 1.0;
  return m;
}

const EventLog& paper_log(std::size_t cases) {
  static std::map<std::size_t, EventLog> logs;
  auto it = logs.find(cases);
  if (it == logs.end()) it = logs.emplace(cases, generate_log(paper_process_graph(), {cases, 1, 100})).first;
  return it->second;
}

void BM_GruStep(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  nn::ParameterStore store;
  const nn::GruCell cell(store, "gru", 16, hidden);
  nn::initialize(store, rng);
  const nn::Vector x = nn::Vector::Random(16), h = nn::Vector::Random(static_cast<Eigen::Index>(hidden));
  for (auto _ : state) benchmark::DoNotOptimize(nn::gru_step(store, cell, x, h));
}
BENCHMARK(BM_GruStep)->Arg(16)->Arg(64);

// Forward and backward over a batch of 500 sequences of length 30.
void BM_GruSequence(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  nn::ParameterStore store;
  const nn::GruCell cell(store, "gru", 16, hidden);
  nn::initialize(store, rng);
  nn::Sequence inputs, grads;
  for (int t = 0; t < 30; ++t) {
    inputs.push_back(random_matrix(500, 16, rng));
    grads.push_back(random_matrix(500, hidden, rng));
  }
  for (auto _ : state) {
    nn::GruCell::Cache cache;
    benchmark::DoNotOptimize(cell.forward(store, inputs, &cache));
    store.zero_grad();
    benchmark::DoNotOptimize(cell.backward(store, cache, grads));
  }
}
BENCHMARK(BM_GruSequence)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  const EncodedLog enc = encode(paper_log(1000));
  BinetConfig cfg;
  cfg.version = static_cast<BinetVersion>(state.range(0));
  cfg.epochs = 1;
  cfg.recalibrate_batchnorm = false;
  for (auto _ : state) {
    BinetModel m = BinetModel::build(enc, cfg);
    benchmark::DoNotOptimize(m.train(enc));
  }
}
BENCHMARK(BM_TrainEpoch)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_Score(benchmark::State& state) {
  const EncodedLog enc = encode(paper_log(1000));
  BinetConfig cfg;
  cfg.epochs = 1;
  BinetModel m = BinetModel::build(enc, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(m.score(enc));
}
BENCHMARK(BM_Score)->Unit(benchmark::kMillisecond);

void BM_Heuristic(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> scores(100000);
  std::vector<std::uint8_t> truth(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    truth[i] = uniform01(rng) < 0.1 ? 1 : 0;
    scores[i] = std::min(1.0, uniform01(rng) * (truth[i] ? 1.5 : 1.0));
  }
  const auto h = static_cast<Heuristic>(state.range(0));
  state.SetLabel(std::string(to_string(h)));
  for (auto _ : state) benchmark::DoNotOptimize(select_threshold(h, scores, truth));
}
BENCHMARK(BM_Heuristic)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_TStide(benchmark::State& state) {
  const EventLog& log = paper_log(5000);
  for (auto _ : state) benchmark::DoNotOptimize(tstide_score(log, 2));
}
BENCHMARK(BM_TStide)->Unit(benchmark::kMillisecond);

void BM_LikelihoodPlus(benchmark::State& state) {
  const EventLog& log = paper_log(5000);
  for (auto _ : state) benchmark::DoNotOptimize(likelihood_score(mine_likelihood_graph(log), log));
}
BENCHMARK(BM_LikelihoodPlus)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
