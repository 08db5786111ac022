#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spgemm/csr.hpp"

namespace spgemm {

// Largest fixed accumulator tiers, one of each per worker (the 96 KB
// scratch analog: 24575 * 4 B and 8191 * 12 B).
inline constexpr std::int64_t kMaxSymbolicTableSize = 24575;
inline constexpr std::int64_t kMaxNumericTableSize = 8191;

// Rows in the largest symbolic bin spill to the heap tier once their
// accumulated nnz exceeds 0.8 of the table capacity (19660 slots).
inline constexpr std::int64_t spill_threshold_for(std::int64_t table_size) {
  return table_size * 4 / 5;
}
inline constexpr std::int64_t kSymbolicSpillThreshold = spill_threshold_for(kMaxSymbolicTableSize);

struct HashParams {
  // Multiplier applied to the key before masking/modding. Must be odd so
  // multiplication permutes residues modulo powers of two.
  std::int64_t hash_scale = 107;
};

// Probe instrumentation: table_accesses counts slot read-claims, one per
// probe iteration by contract.
struct ProbeStats {
  std::int64_t iterations = 0;
  std::int64_t table_accesses = 0;
};

enum class InsertResult { kNew, kExisting, kFull };

// Key-only open-addressing table for the symbolic phase. Capacity is the
// span length; power-of-two capacities address with a mask, others with a
// modulus. Slots must hold the -1 sentinel on entry (reset() restores it).
class SymbolicTable {
 public:
  SymbolicTable(std::span<index_t> slots, HashParams params = {});

  InsertResult insert(index_t key) { return insert_impl<false>(key, nullptr); }
  InsertResult insert_counted(index_t key, ProbeStats& stats) {
    return insert_impl<true>(key, &stats);
  }

  std::int64_t capacity() const { return t_size_; }
  std::int64_t nnz() const { return nnz_; }
  bool pow2() const { return pow2_; }

  std::int64_t initial_slot(index_t key) const {
    const std::int64_t scaled = static_cast<std::int64_t>(key) * scale_;
    return pow2_ ? (scaled & (t_size_ - 1)) : (scaled % t_size_);
  }

  void reset();

 private:
  template <bool kCounted>
  InsertResult insert_impl(index_t key, ProbeStats* stats) {
    std::int64_t hash = initial_slot(key);
    for (std::int64_t step = 0; step < t_size_; ++step) {
      if constexpr (kCounted) {
        ++stats->iterations;
        ++stats->table_accesses;
      }
      // Single table access per iteration: the read doubles as the claim
      // check (the sequential analog of atomicCAS).
      const index_t old = slots_[static_cast<std::size_t>(hash)];
      if (old == kEmptySlot) {
        slots_[static_cast<std::size_t>(hash)] = key;
        ++nnz_;
        return InsertResult::kNew;
      }
      if (old == key) {
        return InsertResult::kExisting;
      }
      hash = pow2_ ? ((hash + 1) & (t_size_ - 1)) : (hash + 1 == t_size_ ? 0 : hash + 1);
    }
    return InsertResult::kFull;
  }

  std::span<index_t> slots_;
  std::int64_t t_size_;
  std::int64_t scale_;
  bool pow2_;
  std::int64_t nnz_ = 0;
};

// (key, value) open-addressing table for the numeric phase. Always
// modulus-addressed: the fixed numeric tiers are not powers of two.
class NumericTable {
 public:
  NumericTable(std::span<index_t> cols, std::span<double> vals, HashParams params = {});

  // Adds product into the slot owned by key; claims a fresh slot when the
  // key is absent. Returns false when the table is full and the key absent.
  bool insert(index_t key, double product) { return insert_impl<false>(key, product, nullptr); }
  bool insert_counted(index_t key, double product, ProbeStats& stats) {
    return insert_impl<true>(key, product, &stats);
  }

  std::int64_t capacity() const { return t_size_; }
  std::int64_t occupied() const { return occupied_; }

  std::int64_t initial_slot(index_t key) const {
    return (static_cast<std::int64_t>(key) * scale_) % t_size_;
  }

  std::span<const index_t> cols() const { return cols_; }
  std::span<const double> vals() const { return vals_; }

  void reset();

 private:
  template <bool kCounted>
  bool insert_impl(index_t key, double product, ProbeStats* stats) {
    std::int64_t hash = initial_slot(key);
    for (std::int64_t step = 0; step < t_size_; ++step) {
      if constexpr (kCounted) {
        ++stats->iterations;
        ++stats->table_accesses;
      }
      const index_t old = cols_[static_cast<std::size_t>(hash)];
      if (old == kEmptySlot) {
        cols_[static_cast<std::size_t>(hash)] = key;
        vals_[static_cast<std::size_t>(hash)] += product;
        ++occupied_;
        return true;
      }
      if (old == key) {
        vals_[static_cast<std::size_t>(hash)] += product;
        return true;
      }
      hash = hash + 1 == t_size_ ? 0 : hash + 1;
    }
    return false;
  }

  std::span<index_t> cols_;
  std::span<double> vals_;
  std::int64_t t_size_;
  std::int64_t scale_;
  std::int64_t occupied_ = 0;
};

struct Entry {
  index_t col;
  double val;
};

// Per-worker fixed buffers sized for the largest tiers, reused across
// rows. Taking a table resets only the active t_size prefix.
class ScratchArena {
 public:
  explicit ScratchArena(HashParams params = {});

  SymbolicTable symbolic_table(std::int64_t t_size);
  NumericTable numeric_table(std::int64_t t_size);
  std::span<Entry> entries(std::int64_t n);
  std::span<Entry> sort_scratch(std::int64_t n);

  const HashParams& params() const { return params_; }

 private:
  HashParams params_;
  std::vector<index_t> sym_slots_;
  std::vector<index_t> num_cols_;
  std::vector<double> num_vals_;
  std::vector<Entry> entries_;
  std::vector<Entry> sort_scratch_;
};

inline constexpr std::int64_t kSpillSignal = -1;

// Counts the distinct B-columns reachable from one A row through table.
// Returns kSpillSignal once the count exceeds spill_threshold (0 disables
// spilling; a full table then means the row was binned into too small a
// tier and throws std::logic_error).
std::int64_t symbolic_row(std::span<const index_t> a_row_cols, const CsrMatrix& b,
                          SymbolicTable& table, std::int64_t spill_threshold = 0);

// Heap-tier recompute for spilled rows: one table sized to the smallest
// power of two >= 2 * n_prod of the row.
std::int64_t symbolic_row_unbounded(std::span<const index_t> a_row_cols, const CsrMatrix& b,
                                    HashParams params = {});

inline constexpr std::int64_t kTableFullSignal = -1;

// Hashing, condensing, and sorting for one output row. Writes the row's
// entries (strictly increasing columns) into out and returns their count,
// or kTableFullSignal if the table cannot hold the row (caller escalates
// to the heap tier). sort_scratch, when it covers the row, enables the
// radix sort.
std::int64_t numeric_row(std::span<const index_t> a_row_cols, std::span<const double> a_row_vals,
                         const CsrMatrix& b, NumericTable& table, std::span<Entry> out,
                         std::span<Entry> sort_scratch = {});

// Gathers the non-sentinel (col, val) pairs of table into out slot order;
// returns their count (== table.occupied()).
std::int64_t condense(const NumericTable& table, std::span<Entry> out);

// Column-ascending sort; keys are distinct by table invariant.
void sort_entries(std::span<Entry> entries);

// Same ordering via byte-wise LSD radix passes (pass count from
// key_bound, the exclusive upper bound on the columns). Falls back to the
// comparison sort for short runs or when scratch does not cover entries.
void sort_entries(std::span<Entry> entries, std::span<Entry> scratch, index_t key_bound);

}  // namespace spgemm
