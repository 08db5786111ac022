#pragma once

#include <array>
#include <atomic>
#include <future>
#include <memory>
#include <optional>
#include <string>

#include "spgemm/binning.hpp"
#include "spgemm/csr.hpp"
#include "spgemm/hash_tables.hpp"
#include "spgemm/reference.hpp"
#include "spgemm/task_pool.hpp"

namespace spgemm {

enum class ScratchTier { kFixedArena, kGrowableHeap };

struct BinStrategy {
  int bin = 0;
  std::int64_t metric_lo = 0;
  std::int64_t metric_hi = kNoUpperBound;
  std::int64_t table_size = 0;  // 0 for the heap tier
  ScratchTier tier = ScratchTier::kFixedArena;
  std::int64_t spill_threshold = 0;  // > 0 only in the largest symbolic bin
  int launch_rank = 0;
};

// Per-bin strategy map for one phase. Default launch ranks order
// large-row bins before small-row bins.
struct ExecutionPlan {
  Phase phase = Phase::kSymbolic;
  BinConfig config;
  std::array<BinStrategy, kNumBins> strategies{};

  // Bin indices sorted by launch rank.
  std::array<int, kNumBins> launch_order() const;
};

ExecutionPlan make_execution_plan(const BinConfig& config);

// Tracks the pipeline's big allocations: the metadata arena and C.rpt are
// the two metadata allocations; C.col and C.val are the output ones.
struct AllocStats {
  std::atomic<std::int64_t> metadata_calls{0};
  std::atomic<std::int64_t> metadata_bytes{0};
  std::atomic<std::int64_t> output_calls{0};
  std::atomic<std::int64_t> output_bytes{0};
};

// One contiguous allocation holding all binning metadata plus scan scratch
// and the spill-id buffer. Sized from the row count alone, before any
// compute step.
class MetadataArena {
 public:
  MetadataArena(std::int64_t rows, AllocStats* stats);

  std::span<std::int64_t> bins() { return {data_.get() + bins_off_, static_cast<std::size_t>(rows_)}; }
  std::span<std::int64_t> bin_size() { return {data_.get() + bin_size_off_, kNumBins}; }
  std::span<std::int64_t> bin_offset() { return {data_.get() + bin_offset_off_, kNumBins}; }
  std::span<std::int64_t> scan_scratch() {
    return {data_.get() + scratch_off_, static_cast<std::size_t>(scratch_len_)};
  }
  std::span<std::int64_t> spill_ids() {
    return {data_.get() + spill_off_, static_cast<std::size_t>(rows_)};
  }

  std::int64_t size_bytes() const { return total_len_ * static_cast<std::int64_t>(sizeof(std::int64_t)); }

 private:
  std::int64_t rows_;
  std::int64_t bins_off_, bin_size_off_, bin_offset_off_, scratch_off_, spill_off_;
  std::int64_t scratch_len_, total_len_;
  std::unique_ptr<std::int64_t[]> data_;
};

struct SpgemmOptions {
  std::string sym_preset = kDefaultSymPreset;
  std::string num_preset = kDefaultNumPreset;
  int workers = 0;  // 0 picks hardware concurrency
  bool overlap = true;
  bool deterministic = true;
  std::int64_t chunk_rows = kDefaultChunkRows;
  HashParams hash;
  AllocStats* alloc_stats = nullptr;
  // Test hooks: override the per-phase bin launch order (must be a
  // permutation of 0..7). Output must not depend on it.
  std::optional<std::array<int, kNumBins>> sym_launch_order;
  std::optional<std::array<int, kNumBins>> num_launch_order;
};

struct StepTimings {
  double setup = 0;
  double sym_binning = 0;
  double symbolic = 0;
  double rpt_alloc = 0;
  double num_binning = 0;
  double numeric = 0;
  double cleanup = 0;
  double total = 0;
};

struct SpgemmOutput {
  CsrMatrix c;
  MatrixStats stats;
  StepTimings timings;
  std::int64_t spilled_rows = 0;
  int workers = 0;
};

// In-place exclusive sum over the M+1 rpt buffer (per-row nnz -> row
// pointers); returns the grand total that lands in the tail slot.
offset_t build_rpt(std::span<offset_t> rpt_region, TaskPool* pool = nullptr,
                   std::span<std::int64_t> scratch = {});

// Six-step two-phase SpGEMM. Steps can also be driven one at a time (in
// order) for inspection; run() does the whole flow.
class SpgemmPipeline {
 public:
  // The pipeline borrows a and b; they must outlive it.
  SpgemmPipeline(const CsrMatrix& a, const CsrMatrix& b, const SpgemmOptions& options = {});
  SpgemmPipeline(const CsrMatrix&&, const CsrMatrix&, const SpgemmOptions& = {}) = delete;
  SpgemmPipeline(const CsrMatrix&, const CsrMatrix&&, const SpgemmOptions& = {}) = delete;
  ~SpgemmPipeline();

  SpgemmOutput run();

  void setup();
  void symbolic_binning();
  void run_symbolic();
  void numeric_binning();  // both passes, C.col/C.val allocation overlapped
  offset_t finalize_rpt();  // exclusive sum; joins the allocation lane
  void run_numeric();
  SpgemmOutput finish();

  // n_prod per row after setup, per-row nnz after the symbolic phase.
  std::span<const offset_t> rpt_region() const;
  const BinningResult& binning() const { return binning_; }
  const ExecutionPlan& symbolic_plan() const { return sym_plan_; }
  const ExecutionPlan& numeric_plan() const { return num_plan_; }

 private:
  enum class Stage { kNew, kSetup, kSymBinned, kSymbolic, kNumBinned, kRptDone, kNumeric, kDone };
  void expect_stage(Stage expected, const char* op);
  void run_phase(const ExecutionPlan& plan, Phase phase);
  void allocate_output();

  const CsrMatrix& a_;
  const CsrMatrix& b_;
  SpgemmOptions options_;
  ExecutionPlan sym_plan_;
  ExecutionPlan num_plan_;

  std::unique_ptr<TaskPool> pool_;
  std::vector<std::unique_ptr<ScratchArena>> scratch_;
  std::unique_ptr<MetadataArena> arena_;
  Buffer<offset_t> rpt_;
  CsrMatrix c_;
  BinningResult binning_{};
  offset_t total_nprod_ = 0;
  offset_t total_nnz_ = 0;
  std::atomic<std::int64_t> spill_count_{0};
  std::future<void> alloc_lane_;  // pending C.col/C.val allocation
  bool output_alloc_pending_ = false;
  StepTimings timings_;
  Stage stage_ = Stage::kNew;
};

inline SpgemmOutput multiply(const CsrMatrix& a, const CsrMatrix& b,
                             const SpgemmOptions& options = {}) {
  return SpgemmPipeline(a, b, options).run();
}

}  // namespace spgemm
