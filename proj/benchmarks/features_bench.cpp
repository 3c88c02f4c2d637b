// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "flucast/features.hpp"
#include "flucast/rng.hpp"

using namespace flucast;

namespace {

CountryPanel bench_panel(std::size_t countries, std::size_t weeks) {
  Rng rng(1);
  std::vector<std::string> names;
  Matrix values(countries, weeks);
  for (std::size_t c = 0; c < countries; ++c) {
    names.push_back("C" + std::to_string(c));
    for (std::size_t t = 0; t < weeks; ++t) values(c, t) = std::floor(rng.uniform(0, 500));
  }
  return CountryPanel(names, EpiWeek(2010, 1), values, std::vector<std::uint8_t>(countries * weeks, 0));
}

void BM_BuildFeatures(benchmark::State& state) {
  const auto panel = bench_panel(static_cast<std::size_t>(state.range(0)), 430);
  FeatureSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(build_features(panel, "C0", spec));
  state.SetLabel(std::to_string(expected_column_count(spec, panel.num_countries())) + " columns");
}
BENCHMARK(BM_BuildFeatures)->Arg(1)->Arg(6)->Arg(23)->Unit(benchmark::kMillisecond);

void BM_RollingMedian(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> window(static_cast<std::size_t>(state.range(0)));
  for (auto& v : window) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(rolling_statistic(window, RollingStat::Median));
}
BENCHMARK(BM_RollingMedian)->Arg(4)->Arg(13)->Arg(52);

}  // namespace
