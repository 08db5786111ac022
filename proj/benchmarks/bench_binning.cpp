#include <benchmark/benchmark.h>

#include <random>

#include "spgemm/binning.hpp"

using namespace spgemm;

namespace {

std::vector<std::int64_t> metric_vector(std::int64_t n, std::int64_t max_value) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::int64_t> dist(0, max_value);
  std::vector<std::int64_t> metric(static_cast<std::size_t>(n));
  for (auto& v : metric) {
    v = dist(rng);
  }
  return metric;
}

}  // namespace

static void BM_BinningPass1(benchmark::State& state) {
  const auto metric = metric_vector(state.range(0), 50000);
  const BinConfig config = symbolic_preset("sym_1.2x");
  TaskPool pool(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(binning_pass1(metric, config, &pool));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BinningPass1)->Args({1 << 20, 1})->Args({1 << 20, 2})->Args({1 << 20, 4});

static void BM_BinningFull(benchmark::State& state) {
  const auto metric = metric_vector(state.range(0), state.range(1));
  const BinConfig config = symbolic_preset("sym_1.2x");
  TaskPool pool(2);
  std::vector<std::int64_t> bins(metric.size());
  std::vector<std::int64_t> bin_size(kNumBins);
  std::vector<std::int64_t> bin_offset(kNumBins);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_binning(metric, config, bins, bin_size, bin_offset, &pool));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BinningFull)
    ->Args({1 << 20, 20})      // fast path: everything in bin 0
    ->Args({1 << 20, 50000});  // two-pass path

static void BM_ExclusiveScan(benchmark::State& state) {
  const auto counts = metric_vector(state.range(0), 16);
  TaskPool pool(static_cast<int>(state.range(1)));
  std::vector<std::int64_t> scratch(1024);
  std::vector<std::int64_t> buf(counts.size());
  for (auto _ : state) {
    std::copy(counts.begin(), counts.end(), buf.begin());
    benchmark::DoNotOptimize(
        exclusive_sum_inplace(buf, state.range(1) > 0 ? &pool : nullptr, scratch));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExclusiveScan)->Args({1 << 22, 0})->Args({1 << 22, 2})->Args({1 << 22, 4});
