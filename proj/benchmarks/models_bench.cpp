// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "flucast/forest.hpp"
#include "flucast/lstm.hpp"
#include "flucast/rng.hpp"
#include "flucast/svr.hpp"

using namespace flucast;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = rng.normal();
  return m;
}

ColumnNames plain_columns(std::size_t n) {
  ColumnNames c;
  for (std::size_t i = 0; i < n; ++i) c.push_back("f" + std::to_string(i));
  return c;
}

// args: hidden size, sequence length
void BM_LstmForwardBackward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  LstmParams params({3, hidden, 1, 8});
  params.initialize(1);
  const auto seq = random_matrix(steps, 3, 2);
  const std::vector<double> head(8, 0.5);
  for (auto _ : state) {
    const auto out = lstm_forward(params, seq, head);
    benchmark::DoNotOptimize(lstm_backward(params, out.cache, out.prediction));
  }
}
BENCHMARK(BM_LstmForwardBackward)->Args({8, 12})->Args({8, 52})->Args({32, 52});

void BM_ForestFit(benchmark::State& state) {
  const auto cols = static_cast<std::size_t>(state.range(0));
  const auto x = random_matrix(300, cols, 3);
  std::vector<double> y(300);
  for (std::size_t r = 0; r < 300; ++r) y[r] = x(r, 0) - 0.5 * x(r, 1);
  ForestConfig cfg;
  cfg.n_trees = 20;
  cfg.max_depth = 8;
  const auto names = plain_columns(cols);
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(cfg, x, names, y));
}
BENCHMARK(BM_ForestFit)->Arg(40)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SvrFit(benchmark::State& state) {
  const auto x = random_matrix(300, 400, 4);
  std::vector<double> y(300);
  for (std::size_t r = 0; r < 300; ++r) y[r] = x(r, 3);
  SvrConfig cfg;
  const auto names = plain_columns(400);
  for (auto _ : state) benchmark::DoNotOptimize(fit_svr(cfg, x, names, y));
}
BENCHMARK(BM_SvrFit)->Unit(benchmark::kMillisecond);

}  // namespace
