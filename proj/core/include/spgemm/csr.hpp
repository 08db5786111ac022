#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spgemm {

// Column indices are 32-bit (sentinel -1 marks an empty hash slot);
// row pointers and product/nonzero totals are 64-bit throughout since
// they overflow 32 bits on large inputs.
using index_t = std::int32_t;
using offset_t = std::int64_t;

constexpr index_t kEmptySlot = -1;

// Allocator that default-initializes on resize, so growing a matrix
// buffer costs an allocation, not an allocation plus a zero-fill. Every
// element is written by the pipeline before it is read.
template <class T>
class DefaultInitAllocator : public std::allocator<T> {
 public:
  template <class U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    if constexpr (sizeof...(Args) == 0) {
      ::new (static_cast<void*>(p)) U;
    } else {
      ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
    }
  }
};

template <class T>
using Buffer = std::vector<T, DefaultInitAllocator<T>>;

// Compressed sparse row storage. rpt has rows+1 entries with rpt[0] = 0
// and rpt[rows] = nnz; col/val hold the column indices and values of each
// row back to back, columns strictly increasing within a row.
struct CsrMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  Buffer<offset_t> rpt = {0};
  Buffer<index_t> col;
  Buffer<double> val;

  offset_t nnz() const { return rpt.empty() ? 0 : rpt.back(); }
  offset_t row_nnz(std::int64_t i) const { return rpt[i + 1] - rpt[i]; }

  std::span<const index_t> row_cols(std::int64_t i) const {
    return {col.data() + rpt[i], static_cast<std::size_t>(rpt[i + 1] - rpt[i])};
  }
  std::span<const double> row_vals(std::int64_t i) const {
    return {val.data() + rpt[i], static_cast<std::size_t>(rpt[i + 1] - rpt[i])};
  }

  bool operator==(const CsrMatrix&) const = default;
};

struct CooEntry {
  std::int64_t row = 0;
  std::int64_t col = 0;
  double value = 0.0;
};

// Ingestion intermediate: unordered triples, duplicates allowed (they are
// summed when converting to CSR).
struct CooEntries {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<CooEntry> entries;
};

// Converts triples to CSR: duplicates summed (in input order), columns
// sorted per row. Throws std::out_of_range if any index is outside the
// declared shape.
CsrMatrix csr_from_coo(const CooEntries& coo);

// Inverse of csr_from_coo on valid matrices (row-major, sorted triples).
CooEntries to_coo(const CsrMatrix& m);

struct Violation {
  std::int64_t row = -1;  // -1 for matrix-level violations
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Checks every CsrMatrix invariant and reports all violations found.
ValidationReport validate_csr(const CsrMatrix& m);

// Row-major dense expansion. Refuses matrices above max_cells (the dense
// oracle guard); throws std::length_error in that case.
std::vector<double> to_dense(const CsrMatrix& m, std::int64_t max_cells = 1'000'000);

inline bool same_pattern(const CsrMatrix& a, const CsrMatrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.rpt == b.rpt && a.col == b.col;
}

// Largest |x - y| / max(|x|, |y|, 1) over paired values; requires equal
// patterns.
double max_relative_error(const CsrMatrix& a, const CsrMatrix& b);

}  // namespace spgemm
