#include <benchmark/benchmark.h>

#include <random>

#include "spgemm/pipeline.hpp"
#include "spgemm/synthetic.hpp"

using namespace spgemm;

static void BM_Multiply(benchmark::State& state) {
  std::mt19937_64 rng(31337);
  const CsrMatrix a = random_csr_fixed_row_nnz(state.range(0), state.range(0), 24, rng);
  SpgemmOptions options;
  options.workers = static_cast<int>(state.range(1));
  offset_t nprod = 0;
  for (auto _ : state) {
    const SpgemmOutput out = multiply(a, a, options);
    nprod = out.stats.total_nprod;
    benchmark::DoNotOptimize(out.c.nnz());
  }
  // FLOP counting convention: two per intermediate product.
  state.counters["gflops"] = benchmark::Counter(
      2.0 * static_cast<double>(nprod) * static_cast<double>(state.iterations()) / 1e9,
      benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Multiply)
    ->Args({20000, 1})
    ->Args({20000, 2})
    ->Args({20000, 4})
    ->Unit(benchmark::kMillisecond);

static void BM_MultiplyNoOverlap(benchmark::State& state) {
  std::mt19937_64 rng(31337);
  const CsrMatrix a = random_csr_fixed_row_nnz(20000, 20000, 24, rng);
  SpgemmOptions options;
  options.workers = 2;
  options.overlap = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(multiply(a, a, options).c.nnz());
  }
}
BENCHMARK(BM_MultiplyNoOverlap)->Unit(benchmark::kMillisecond);
