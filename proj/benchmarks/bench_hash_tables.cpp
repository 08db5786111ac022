#include <benchmark/benchmark.h>

#include <random>

#include "spgemm/hash_tables.hpp"
#include "spgemm/synthetic.hpp"

using namespace spgemm;

namespace {

// One A row touching `refs` B rows of ~32 columns each, against the tier
// that its product count lands in.
struct RowWorkload {
  CsrMatrix b;
  std::vector<index_t> a_cols;
  std::vector<double> a_vals;

  explicit RowWorkload(int refs) {
    std::mt19937_64 rng(1234 + static_cast<unsigned>(refs));
    b = random_csr_fixed_row_nnz(refs, 1 << 20, 32, rng);
    for (int k = 0; k < refs; ++k) {
      a_cols.push_back(static_cast<index_t>(k));
      a_vals.push_back(0.5);
    }
  }
};

}  // namespace

static void BM_SymbolicRow(benchmark::State& state) {
  const RowWorkload w(static_cast<int>(state.range(0)));
  ScratchArena scratch;
  const std::int64_t t_size = state.range(1);
  for (auto _ : state) {
    SymbolicTable table = scratch.symbolic_table(t_size);
    benchmark::DoNotOptimize(symbolic_row(w.a_cols, w.b, table));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 32);
}
BENCHMARK(BM_SymbolicRow)->Args({8, 512})->Args({32, 2048})->Args({128, 8192})->Args({512, 24575});

static void BM_NumericRow(benchmark::State& state) {
  const RowWorkload w(static_cast<int>(state.range(0)));
  ScratchArena scratch;
  const std::int64_t t_size = state.range(1);
  for (auto _ : state) {
    NumericTable table = scratch.numeric_table(t_size);
    auto out = scratch.entries(t_size);
    benchmark::DoNotOptimize(numeric_row(w.a_cols, w.a_vals, w.b, table, out));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 32);
}
BENCHMARK(BM_NumericRow)->Args({4, 255})->Args({16, 1023})->Args({64, 4095})->Args({128, 8191});

static void BM_SymbolicInsertHot(benchmark::State& state) {
  std::mt19937_64 rng(99);
  std::vector<index_t> keys(4096);
  for (auto& k : keys) {
    k = static_cast<index_t>(rng() % 6000);
  }
  ScratchArena scratch;
  for (auto _ : state) {
    SymbolicTable table = scratch.symbolic_table(8192);
    for (const index_t k : keys) {
      benchmark::DoNotOptimize(table.insert(k));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(keys.size()));
}
BENCHMARK(BM_SymbolicInsertHot);
