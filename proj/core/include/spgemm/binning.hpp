#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spgemm/task_pool.hpp"

namespace spgemm {

inline constexpr int kNumBins = 8;
inline constexpr std::int64_t kNoUpperBound = std::numeric_limits<std::int64_t>::max();

// Rows per worker task in the binning passes (the thread-block analog).
inline constexpr std::int64_t kDefaultChunkRows = 4096;

// Elements per chunk in the parallel exclusive scan.
inline constexpr std::int64_t kScanChunk = 1 << 16;

enum class Phase { kSymbolic, kNumeric };

// Binning ranges and per-bin hash-table capacities. upper[j] is the
// inclusive largest metric value of bin j (the last bin is the catch-all);
// table_size[j] is the accumulator capacity of that bin, 0 meaning the
// growable heap tier.
struct BinConfig {
  Phase phase = Phase::kSymbolic;
  std::array<std::int64_t, kNumBins> upper{};
  std::array<std::int64_t, kNumBins> table_size{};
  std::string preset_name;
};

// Preset lookup. Symbolic names: sym_1x, sym_1.2x, sym_1.5x; numeric
// names: num_1x, num_1.5x, num_2x, num_3x. Throws std::invalid_argument
// for unknown names.
BinConfig preset(Phase phase, const std::string& name);

inline BinConfig symbolic_preset(const std::string& name) { return preset(Phase::kSymbolic, name); }
inline BinConfig numeric_preset(const std::string& name) { return preset(Phase::kNumeric, name); }

std::vector<std::string> preset_names(Phase phase);

inline constexpr const char* kDefaultSymPreset = "sym_1.2x";
inline constexpr const char* kDefaultNumPreset = "num_2x";

// Smallest j with value <= upper[j].
int classify(std::int64_t value, const BinConfig& config);

struct Pass1Result {
  std::array<std::int64_t, kNumBins> bin_size{};
  std::int64_t max_metric = 0;
  std::int64_t total_metric = 0;
};

// First pass: per-bin row counts plus the max and the sum of the metric.
// Each worker task accumulates a private histogram over its contiguous row
// chunk and merges it into the result once.
Pass1Result binning_pass1(std::span<const std::int64_t> metric, const BinConfig& config,
                          TaskPool* pool = nullptr, std::int64_t chunk = kDefaultChunkRows);

// In-place exclusive prefix sum over buf; returns the grand total (which
// also lands in the tail slot when buf carries a trailing zero, turning
// per-row counts into a CSR rpt). scratch, when provided, must hold one
// slot per chunk and enables the parallel two-pass scan.
std::int64_t exclusive_sum_inplace(std::span<std::int64_t> buf, TaskPool* pool = nullptr,
                                   std::span<std::int64_t> scratch = {},
                                   std::int64_t chunk = kScanChunk);

std::vector<std::int64_t> exclusive_sum(std::span<const std::int64_t> counts);

// Second pass: writes each row id into its bin's segment of bins.
// Deterministic mode reserves per-chunk sub-segments by a fixed-order
// prefix sum over per-chunk counts, so the output is a pure function of
// (metric, config, chunk); ids appear in ascending order within a chunk.
// Non-deterministic mode reserves with racing fetch-adds instead (one per
// chunk and bin, never one per row).
void binning_pass2(std::span<const std::int64_t> metric, const BinConfig& config,
                   std::span<const std::int64_t> bin_offset, std::span<std::int64_t> bins,
                   TaskPool* pool = nullptr, std::int64_t chunk = kDefaultChunkRows,
                   bool deterministic = true);

// Fast path when pass 1 saw max_metric <= upper[0]: every row lands in
// bin 0 in identity order, skipping the per-row comparisons of pass 2.
void binning_fast(std::span<std::int64_t> bins, TaskPool* pool = nullptr,
                  std::int64_t chunk = kDefaultChunkRows);

struct BinningResult {
  std::span<std::int64_t> bins;
  std::span<std::int64_t> bin_size;    // kNumBins entries
  std::span<std::int64_t> bin_offset;  // kNumBins entries
  std::int64_t max_metric = 0;
  std::int64_t total_metric = 0;
  bool fast_path = false;

  std::span<const std::int64_t> segment(int bin) const {
    return {bins.data() + bin_offset[static_cast<std::size_t>(bin)],
            static_cast<std::size_t>(bin_size[static_cast<std::size_t>(bin)])};
  }
};

// Full binning flow: pass 1, then either the fast path or offsets + pass 2.
// bins/bin_size/bin_offset are caller-provided storage (the metadata
// arena in the pipeline). A precomputed pass-1 result can be supplied when
// the caller already needed its totals.
BinningResult run_binning(std::span<const std::int64_t> metric, const BinConfig& config,
                          std::span<std::int64_t> bins, std::span<std::int64_t> bin_size,
                          std::span<std::int64_t> bin_offset, TaskPool* pool = nullptr,
                          std::int64_t chunk = kDefaultChunkRows, bool deterministic = true,
                          const Pass1Result* precomputed_pass1 = nullptr);

}  // namespace spgemm
