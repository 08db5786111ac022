#include "spgemm/hash_tables.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace spgemm {

namespace {

void check_params(const HashParams& params) {
  if (params.hash_scale <= 0 || params.hash_scale % 2 == 0) {
    throw std::invalid_argument("hash_scale must be a positive odd integer");
  }
}

}  // namespace

SymbolicTable::SymbolicTable(std::span<index_t> slots, HashParams params)
    : slots_(slots),
      t_size_(static_cast<std::int64_t>(slots.size())),
      scale_(params.hash_scale),
      pow2_(t_size_ > 0 && (t_size_ & (t_size_ - 1)) == 0) {
  check_params(params);
  if (t_size_ <= 0) {
    throw std::invalid_argument("symbolic table needs at least one slot");
  }
}

void SymbolicTable::reset() {
  std::fill(slots_.begin(), slots_.end(), kEmptySlot);
  nnz_ = 0;
}

NumericTable::NumericTable(std::span<index_t> cols, std::span<double> vals, HashParams params)
    : cols_(cols),
      vals_(vals),
      t_size_(static_cast<std::int64_t>(cols.size())),
      scale_(params.hash_scale) {
  check_params(params);
  if (t_size_ <= 0 || cols.size() != vals.size()) {
    throw std::invalid_argument("numeric table needs matching non-empty col/val spans");
  }
}

void NumericTable::reset() {
  std::fill(cols_.begin(), cols_.end(), kEmptySlot);
  std::fill(vals_.begin(), vals_.end(), 0.0);
  occupied_ = 0;
}

ScratchArena::ScratchArena(HashParams params)
    : params_(params),
      sym_slots_(kMaxSymbolicTableSize, kEmptySlot),
      num_cols_(kMaxNumericTableSize, kEmptySlot),
      num_vals_(kMaxNumericTableSize, 0.0),
      entries_(kMaxNumericTableSize),
      sort_scratch_(kMaxNumericTableSize) {
  check_params(params);
}

SymbolicTable ScratchArena::symbolic_table(std::int64_t t_size) {
  if (t_size <= 0 || t_size > kMaxSymbolicTableSize) {
    throw std::invalid_argument("symbolic tier size out of range");
  }
  std::fill(sym_slots_.begin(), sym_slots_.begin() + t_size, kEmptySlot);
  return SymbolicTable({sym_slots_.data(), static_cast<std::size_t>(t_size)}, params_);
}

NumericTable ScratchArena::numeric_table(std::int64_t t_size) {
  if (t_size <= 0 || t_size > kMaxNumericTableSize) {
    throw std::invalid_argument("numeric tier size out of range");
  }
  std::fill(num_cols_.begin(), num_cols_.begin() + t_size, kEmptySlot);
  std::fill(num_vals_.begin(), num_vals_.begin() + t_size, 0.0);
  return NumericTable({num_cols_.data(), static_cast<std::size_t>(t_size)},
                      {num_vals_.data(), static_cast<std::size_t>(t_size)}, params_);
}

std::span<Entry> ScratchArena::entries(std::int64_t n) {
  if (n < 0 || n > static_cast<std::int64_t>(entries_.size())) {
    throw std::invalid_argument("entry scratch size out of range");
  }
  return {entries_.data(), static_cast<std::size_t>(n)};
}

std::span<Entry> ScratchArena::sort_scratch(std::int64_t n) {
  if (n < 0 || n > static_cast<std::int64_t>(sort_scratch_.size())) {
    throw std::invalid_argument("sort scratch size out of range");
  }
  return {sort_scratch_.data(), static_cast<std::size_t>(n)};
}

std::int64_t symbolic_row(std::span<const index_t> a_row_cols, const CsrMatrix& b,
                          SymbolicTable& table, std::int64_t spill_threshold) {
  for (const index_t k : a_row_cols) {
    const offset_t lo = b.rpt[static_cast<std::size_t>(k)];
    const offset_t hi = b.rpt[static_cast<std::size_t>(k) + 1];
    for (offset_t q = lo; q < hi; ++q) {
      const InsertResult r = table.insert(b.col[static_cast<std::size_t>(q)]);
      if (r == InsertResult::kNew) {
        if (spill_threshold > 0 && table.nnz() > spill_threshold) {
          return kSpillSignal;
        }
      } else if (r == InsertResult::kFull) {
        throw std::logic_error("symbolic table full in a bin without spill (misbinned row)");
      }
    }
  }
  return table.nnz();
}

std::int64_t symbolic_row_unbounded(std::span<const index_t> a_row_cols, const CsrMatrix& b,
                                    HashParams params) {
  offset_t nprod = 0;
  for (const index_t k : a_row_cols) {
    nprod += b.rpt[static_cast<std::size_t>(k) + 1] - b.rpt[static_cast<std::size_t>(k)];
  }
  const std::uint64_t capacity = std::bit_ceil(static_cast<std::uint64_t>(std::max<offset_t>(2, 2 * nprod)));
  std::vector<index_t> slots(capacity, kEmptySlot);
  SymbolicTable table({slots.data(), slots.size()}, params);
  return symbolic_row(a_row_cols, b, table);
}

std::int64_t condense(const NumericTable& table, std::span<Entry> out) {
  std::int64_t count = 0;
  const auto cols = table.cols();
  const auto vals = table.vals();
  for (std::size_t h = 0; h < cols.size(); ++h) {
    if (cols[h] != kEmptySlot) {
      out[static_cast<std::size_t>(count++)] = {cols[h], vals[h]};
    }
  }
  return count;
}

void sort_entries(std::span<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.col < b.col; });
}

namespace {
constexpr std::size_t kRadixCutoff = 96;
}

void sort_entries(std::span<Entry> entries, std::span<Entry> scratch, index_t key_bound) {
  const std::size_t n = entries.size();
  if (n < kRadixCutoff || scratch.size() < n || key_bound <= 0) {
    sort_entries(entries);
    return;
  }
  const int key_bits = std::bit_width(static_cast<std::uint32_t>(key_bound - 1));
  const int passes = (key_bits + 7) / 8;

  Entry* src = entries.data();
  Entry* dst = scratch.data();
  for (int pass = 0; pass < passes; ++pass) {
    const int shift = 8 * pass;
    std::uint32_t hist[256] = {};
    for (std::size_t i = 0; i < n; ++i) {
      ++hist[(static_cast<std::uint32_t>(src[i].col) >> shift) & 0xFF];
    }
    std::uint32_t offset = 0;
    for (std::uint32_t& h : hist) {
      const std::uint32_t count = h;
      h = offset;
      offset += count;
    }
    for (std::size_t i = 0; i < n; ++i) {
      dst[hist[(static_cast<std::uint32_t>(src[i].col) >> shift) & 0xFF]++] = src[i];
    }
    std::swap(src, dst);
  }
  if (src != entries.data()) {
    std::copy(src, src + n, entries.data());
  }
}

std::int64_t numeric_row(std::span<const index_t> a_row_cols, std::span<const double> a_row_vals,
                         const CsrMatrix& b, NumericTable& table, std::span<Entry> out,
                         std::span<Entry> sort_scratch) {
  for (std::size_t p = 0; p < a_row_cols.size(); ++p) {
    const index_t k = a_row_cols[p];
    const double aval = a_row_vals[p];
    const offset_t lo = b.rpt[static_cast<std::size_t>(k)];
    const offset_t hi = b.rpt[static_cast<std::size_t>(k) + 1];
    for (offset_t q = lo; q < hi; ++q) {
      if (!table.insert(b.col[static_cast<std::size_t>(q)],
                        aval * b.val[static_cast<std::size_t>(q)])) {
        return kTableFullSignal;
      }
    }
  }
  if (table.occupied() > static_cast<std::int64_t>(out.size())) {
    throw std::logic_error("numeric_row: accumulator holds more entries than the output slot");
  }
  const std::int64_t count = condense(table, out);
  sort_entries(out.subspan(0, static_cast<std::size_t>(count)), sort_scratch,
               static_cast<index_t>(b.cols));
  return count;
}

}  // namespace spgemm
