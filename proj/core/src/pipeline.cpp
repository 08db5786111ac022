#include "spgemm/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <exception>
#include <mutex>
#include <stdexcept>

namespace spgemm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// First exception thrown by any task of a phase; the rest are dropped.
class ErrorSlot {
 public:
  void capture() {
    std::lock_guard lock(mu_);
    if (!error_) {
      error_ = std::current_exception();
    }
  }
  void rethrow_if_set() {
    if (error_) {
      std::rethrow_exception(error_);
    }
  }

 private:
  std::mutex mu_;
  std::exception_ptr error_;
};

void check_launch_order(const std::array<int, kNumBins>& order) {
  std::array<int, kNumBins> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int j = 0; j < kNumBins; ++j) {
    if (sorted[static_cast<std::size_t>(j)] != j) {
      throw std::invalid_argument("launch order must be a permutation of the bin indices");
    }
  }
}

}  // namespace

std::array<int, kNumBins> ExecutionPlan::launch_order() const {
  std::array<int, kNumBins> order{};
  for (int j = 0; j < kNumBins; ++j) {
    order[static_cast<std::size_t>(j)] = j;
  }
  std::stable_sort(order.begin(), order.end(), [this](int x, int y) {
    return strategies[static_cast<std::size_t>(x)].launch_rank <
           strategies[static_cast<std::size_t>(y)].launch_rank;
  });
  return order;
}

ExecutionPlan make_execution_plan(const BinConfig& config) {
  ExecutionPlan plan;
  plan.phase = config.phase;
  plan.config = config;
  std::int64_t lo = 0;
  for (int j = 0; j < kNumBins; ++j) {
    BinStrategy& s = plan.strategies[static_cast<std::size_t>(j)];
    s.bin = j;
    s.metric_lo = lo;
    s.metric_hi = config.upper[static_cast<std::size_t>(j)];
    if (s.metric_hi != kNoUpperBound) {
      lo = s.metric_hi + 1;
    }
    s.table_size = config.table_size[static_cast<std::size_t>(j)];
    s.tier = s.table_size > 0 ? ScratchTier::kFixedArena : ScratchTier::kGrowableHeap;
    // The largest symbolic bin keeps a fixed table and spills rows that
    // outgrow 0.8 of it; other fixed bins never fill by the range invariant.
    s.spill_threshold = (config.phase == Phase::kSymbolic && j == kNumBins - 1 && s.table_size > 0)
                            ? spill_threshold_for(s.table_size)
                            : 0;
    s.launch_rank = kNumBins - 1 - j;  // large-row bins first
  }
  return plan;
}

MetadataArena::MetadataArena(std::int64_t rows, AllocStats* stats) : rows_(rows) {
  bins_off_ = 0;
  bin_size_off_ = bins_off_ + rows_;
  bin_offset_off_ = bin_size_off_ + kNumBins;
  scratch_off_ = bin_offset_off_ + kNumBins;
  scratch_len_ = (rows_ + 1 + kScanChunk - 1) / kScanChunk + 1;
  spill_off_ = scratch_off_ + scratch_len_;
  total_len_ = spill_off_ + rows_;
  data_ = std::make_unique_for_overwrite<std::int64_t[]>(static_cast<std::size_t>(total_len_));
  if (stats != nullptr) {
    stats->metadata_calls.fetch_add(1, std::memory_order_relaxed);
    stats->metadata_bytes.fetch_add(size_bytes(), std::memory_order_relaxed);
  }
}

offset_t build_rpt(std::span<offset_t> rpt_region, TaskPool* pool,
                   std::span<std::int64_t> scratch) {
  return exclusive_sum_inplace(rpt_region, pool, scratch);
}

SpgemmPipeline::SpgemmPipeline(const CsrMatrix& a, const CsrMatrix& b,
                               const SpgemmOptions& options)
    : a_(a),
      b_(b),
      options_(options),
      sym_plan_(make_execution_plan(symbolic_preset(options.sym_preset))),
      num_plan_(make_execution_plan(numeric_preset(options.num_preset))) {
  if (a_.cols != b_.rows) {
    throw std::invalid_argument("spgemm: a.cols (" + std::to_string(a_.cols) +
                                ") != b.rows (" + std::to_string(b_.rows) + ")");
  }
  if (options_.sym_launch_order) {
    check_launch_order(*options_.sym_launch_order);
    for (int j = 0; j < kNumBins; ++j) {
      const int bin = (*options_.sym_launch_order)[static_cast<std::size_t>(j)];
      sym_plan_.strategies[static_cast<std::size_t>(bin)].launch_rank = j;
    }
  }
  if (options_.num_launch_order) {
    check_launch_order(*options_.num_launch_order);
    for (int j = 0; j < kNumBins; ++j) {
      const int bin = (*options_.num_launch_order)[static_cast<std::size_t>(j)];
      num_plan_.strategies[static_cast<std::size_t>(bin)].launch_rank = j;
    }
  }
}

SpgemmPipeline::~SpgemmPipeline() {
  if (alloc_lane_.valid()) {
    alloc_lane_.wait();
  }
}

void SpgemmPipeline::expect_stage(Stage expected, const char* op) {
  if (stage_ != expected) {
    throw std::logic_error(std::string("spgemm pipeline: ") + op + " called out of order");
  }
}

std::span<const offset_t> SpgemmPipeline::rpt_region() const {
  return {rpt_.data(), static_cast<std::size_t>(a_.rows)};
}

void SpgemmPipeline::setup() {
  expect_stage(Stage::kNew, "setup");
  const auto t0 = Clock::now();

  const int workers = options_.workers > 0 ? options_.workers : TaskPool::default_workers();
  pool_ = std::make_unique<TaskPool>(workers);
  scratch_.clear();
  scratch_.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    scratch_.push_back(std::make_unique<ScratchArena>(options_.hash));
  }

  // C.rpt first: its size is known up front and the n_prod values land in
  // its first M slots. No zero-fill: the n_prod pass writes [0, M) and the
  // tail slot is set here.
  const std::int64_t m = a_.rows;
  rpt_.resize(static_cast<std::size_t>(m) + 1);
  rpt_[static_cast<std::size_t>(m)] = 0;
  if (options_.alloc_stats != nullptr) {
    options_.alloc_stats->metadata_calls.fetch_add(1, std::memory_order_relaxed);
    options_.alloc_stats->metadata_bytes.fetch_add(
        static_cast<std::int64_t>((m + 1) * static_cast<std::int64_t>(sizeof(offset_t))),
        std::memory_order_relaxed);
  }

  std::atomic<offset_t> total{0};
  auto nprod_chunk = [&](std::int64_t begin, std::int64_t end) {
    offset_t local = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      offset_t n = 0;
      for (offset_t p = a_.rpt[static_cast<std::size_t>(i)];
           p < a_.rpt[static_cast<std::size_t>(i) + 1]; ++p) {
        const index_t k = a_.col[static_cast<std::size_t>(p)];
        n += b_.rpt[static_cast<std::size_t>(k) + 1] - b_.rpt[static_cast<std::size_t>(k)];
      }
      rpt_[static_cast<std::size_t>(i)] = n;
      local += n;
    }
    total.fetch_add(local, std::memory_order_relaxed);
  };

  if (options_.overlap) {
    // n_prod tasks go out first; the arena allocation runs on this thread
    // while they execute (the tasks never touch the arena).
    const std::int64_t chunk =
        options_.chunk_rows > 0 ? options_.chunk_rows : kDefaultChunkRows;
    WaitGroup wg;
    for (std::int64_t begin = 0; begin < m; begin += chunk) {
      const std::int64_t end = std::min(m, begin + chunk);
      wg.add();
      pool_->submit([&, begin, end] {
        nprod_chunk(begin, end);
        wg.done();
      });
    }
    arena_ = std::make_unique<MetadataArena>(m, options_.alloc_stats);
    wg.wait();
  } else {
    arena_ = std::make_unique<MetadataArena>(m, options_.alloc_stats);
    pool_->parallel_for(m, options_.chunk_rows, nprod_chunk);
  }

  total_nprod_ = total.load();
  if (total_nprod_ < 0) {
    throw std::overflow_error("spgemm: intermediate-product count overflowed 64 bits");
  }
  timings_.setup = seconds_since(t0);
  stage_ = Stage::kSetup;
}

void SpgemmPipeline::symbolic_binning() {
  expect_stage(Stage::kSetup, "symbolic_binning");
  const auto t0 = Clock::now();
  binning_ = run_binning(rpt_region(), sym_plan_.config, arena_->bins(), arena_->bin_size(),
                         arena_->bin_offset(), pool_.get(), options_.chunk_rows,
                         options_.deterministic);
  timings_.sym_binning = seconds_since(t0);
  stage_ = Stage::kSymBinned;
}

void SpgemmPipeline::run_symbolic() {
  expect_stage(Stage::kSymBinned, "run_symbolic");
  const auto t0 = Clock::now();
  spill_count_.store(0);
  run_phase(sym_plan_, Phase::kSymbolic);
  timings_.symbolic = seconds_since(t0);
  stage_ = Stage::kSymbolic;
}

void SpgemmPipeline::numeric_binning() {
  expect_stage(Stage::kSymbolic, "numeric_binning");
  const auto t0 = Clock::now();

  // Total n_nz comes out of pass 1, so C.col/C.val can be allocated while
  // pass 2 still runs; the exclusive sum must wait until both passes are
  // done with the n_nz values in the C.rpt region.
  const Pass1Result pass1 =
      binning_pass1(rpt_region(), num_plan_.config, pool_.get(), options_.chunk_rows);
  total_nnz_ = pass1.total_metric;

  c_.rows = a_.rows;
  c_.cols = b_.cols;
  if (options_.overlap) {
    alloc_lane_ = std::async(std::launch::async, [this] { allocate_output(); });
    output_alloc_pending_ = true;
  }

  binning_ = run_binning(rpt_region(), num_plan_.config, arena_->bins(), arena_->bin_size(),
                         arena_->bin_offset(), pool_.get(), options_.chunk_rows,
                         options_.deterministic, &pass1);

  timings_.num_binning = seconds_since(t0);
  stage_ = Stage::kNumBinned;
}

void SpgemmPipeline::allocate_output() {
  c_.col.resize(static_cast<std::size_t>(total_nnz_));
  c_.val.resize(static_cast<std::size_t>(total_nnz_));
  if (options_.alloc_stats != nullptr) {
    options_.alloc_stats->output_calls.fetch_add(2, std::memory_order_relaxed);
    options_.alloc_stats->output_bytes.fetch_add(
        total_nnz_ * static_cast<std::int64_t>(sizeof(index_t) + sizeof(double)),
        std::memory_order_relaxed);
  }
}

offset_t SpgemmPipeline::finalize_rpt() {
  expect_stage(Stage::kNumBinned, "finalize_rpt");
  const auto t0 = Clock::now();
  const offset_t total = build_rpt({rpt_.data(), rpt_.size()}, pool_.get(), arena_->scan_scratch());
  if (total != total_nnz_) {
    throw std::logic_error("spgemm: exclusive sum disagrees with binning total");
  }
  if (output_alloc_pending_) {
    alloc_lane_.get();
    output_alloc_pending_ = false;
  } else {
    allocate_output();
  }
  timings_.rpt_alloc = seconds_since(t0);
  stage_ = Stage::kRptDone;
  return total;
}

void SpgemmPipeline::run_numeric() {
  expect_stage(Stage::kRptDone, "run_numeric");
  const auto t0 = Clock::now();
  run_phase(num_plan_, Phase::kNumeric);
  timings_.numeric = seconds_since(t0);
  stage_ = Stage::kNumeric;
}

void SpgemmPipeline::run_phase(const ExecutionPlan& plan, Phase phase) {
  const std::array<int, kNumBins> order = plan.launch_order();
  const int workers = pool_->worker_count();
  const int spill_bin = kNumBins - 1;

  WaitGroup wg;
  ErrorSlot errors;
  auto spill_ids = arena_->spill_ids();

  // Heap-tier recompute of spilled rows, enqueued by the task that
  // completes the largest bin's batch.
  auto enqueue_spill_recompute = [&, this] {
    const std::int64_t n = spill_count_.load();
    if (n == 0) {
      return;
    }
    const std::int64_t task_rows = std::max<std::int64_t>(1, n / (8 * workers));
    for (std::int64_t s = 0; s < n; s += task_rows) {
      const std::int64_t e = std::min(n, s + task_rows);
      wg.add();
      pool_->submit([this, &wg, &errors, spill_ids, s, e] {
        try {
          for (std::int64_t idx = s; idx < e; ++idx) {
            const std::int64_t row = spill_ids[static_cast<std::size_t>(idx)];
            rpt_[static_cast<std::size_t>(row)] =
                symbolic_row_unbounded(a_.row_cols(row), b_, options_.hash);
          }
        } catch (...) {
          errors.capture();
        }
        wg.done();
      });
    }
  };

  // Count the largest bin's tasks up front so the recompute fires exactly
  // once, whatever position the bin has in the launch order.
  std::atomic<std::int64_t> spill_tasks_remaining{0};
  if (phase == Phase::kSymbolic) {
    const std::int64_t n7 = binning_.bin_size[static_cast<std::size_t>(spill_bin)];
    if (n7 > 0) {
      const std::int64_t task_rows = std::max<std::int64_t>(1, n7 / (8 * workers));
      spill_tasks_remaining.store((n7 + task_rows - 1) / task_rows);
    }
  }

  for (const int bin : order) {
    const auto segment = binning_.segment(bin);
    const std::int64_t n = static_cast<std::int64_t>(segment.size());
    if (n == 0) {
      continue;
    }
    const std::int64_t task_rows = std::max<std::int64_t>(1, n / (8 * workers));
    for (std::int64_t s = 0; s < n; s += task_rows) {
      const std::int64_t e = std::min(n, s + task_rows);
      wg.add();
      pool_->submit([&, segment, s, e, bin, phase] {
        const BinStrategy& st = plan.strategies[static_cast<std::size_t>(bin)];
        try {
          ScratchArena& scratch = *scratch_[static_cast<std::size_t>(TaskPool::this_worker_index())];
          if (phase == Phase::kSymbolic) {
            for (std::int64_t idx = s; idx < e; ++idx) {
              const std::int64_t row = segment[static_cast<std::size_t>(idx)];
              const auto a_cols = a_.row_cols(row);
              if (a_cols.empty()) {
                rpt_[static_cast<std::size_t>(row)] = 0;
                continue;
              }
              SymbolicTable table = scratch.symbolic_table(st.table_size);
              const std::int64_t r = symbolic_row(a_cols, b_, table, st.spill_threshold);
              if (r == kSpillSignal) {
                spill_ids[static_cast<std::size_t>(spill_count_.fetch_add(1))] = row;
              } else {
                rpt_[static_cast<std::size_t>(row)] = r;
              }
            }
          } else {
            for (std::int64_t idx = s; idx < e; ++idx) {
              const std::int64_t row = segment[static_cast<std::size_t>(idx)];
              const offset_t base = rpt_[static_cast<std::size_t>(row)];
              const offset_t row_nnz = rpt_[static_cast<std::size_t>(row) + 1] - base;
              if (row_nnz == 0) {
                continue;
              }
              std::int64_t count = kTableFullSignal;
              std::span<Entry> out;
              if (st.tier == ScratchTier::kFixedArena) {
                NumericTable table = scratch.numeric_table(st.table_size);
                out = scratch.entries(st.table_size);
                count = numeric_row(a_.row_cols(row), a_.row_vals(row), b_, table, out,
                                    scratch.sort_scratch(st.table_size));
              }
              std::vector<Entry> heap_out;
              if (count == kTableFullSignal) {
                // Heap tier: exact nnz is known, size to 2x and rehash-free.
                const std::uint64_t cap =
                    std::bit_ceil(static_cast<std::uint64_t>(std::max<offset_t>(2, 2 * row_nnz)));
                std::vector<index_t> hcols(cap, kEmptySlot);
                std::vector<double> hvals(cap, 0.0);
                NumericTable table({hcols.data(), hcols.size()}, {hvals.data(), hvals.size()},
                                   options_.hash);
                heap_out.resize(static_cast<std::size_t>(row_nnz));
                std::vector<Entry> heap_sort(static_cast<std::size_t>(row_nnz));
                out = {heap_out.data(), heap_out.size()};
                count = numeric_row(a_.row_cols(row), a_.row_vals(row), b_, table, out,
                                    {heap_sort.data(), heap_sort.size()});
              }
              if (count != row_nnz) {
                throw std::logic_error("spgemm: numeric row nnz disagrees with symbolic result");
              }
              for (std::int64_t t = 0; t < count; ++t) {
                c_.col[static_cast<std::size_t>(base + t)] = out[static_cast<std::size_t>(t)].col;
                c_.val[static_cast<std::size_t>(base + t)] = out[static_cast<std::size_t>(t)].val;
              }
            }
          }
        } catch (...) {
          errors.capture();
        }
        if (phase == Phase::kSymbolic && bin == spill_bin &&
            spill_tasks_remaining.fetch_sub(1) == 1) {
          enqueue_spill_recompute();
        }
        wg.done();
      });
    }
  }
  wg.wait();
  errors.rethrow_if_set();
}

SpgemmOutput SpgemmPipeline::finish() {
  expect_stage(Stage::kNumeric, "finish");

  SpgemmOutput out;
  out.stats = input_stats(a_);
  out.stats.total_nprod = total_nprod_;
  out.stats.nnz_of_product = total_nnz_;
  out.stats.cr = total_nnz_ > 0 ? compression_ratio(total_nprod_, total_nnz_) : 0.0;
  out.spilled_rows = spill_count_.load();
  out.workers = pool_->worker_count();

  c_.rpt = std::move(rpt_);
  out.c = std::move(c_);

  // Cleanup releases the metadata arena and the worker lanes only now,
  // after every task of both phases has completed.
  const auto t0 = Clock::now();
  arena_.reset();
  scratch_.clear();
  pool_.reset();
  timings_.cleanup = seconds_since(t0);
  timings_.total = timings_.setup + timings_.sym_binning + timings_.symbolic +
                   timings_.rpt_alloc + timings_.num_binning + timings_.numeric +
                   timings_.cleanup;
  out.timings = timings_;
  stage_ = Stage::kDone;
  return out;
}

SpgemmOutput SpgemmPipeline::run() {
  setup();
  symbolic_binning();
  run_symbolic();
  numeric_binning();
  finalize_rpt();
  run_numeric();
  return finish();
}

}  // namespace spgemm
