#pragma once

#include <span>

#include "spgemm/csr.hpp"

namespace spgemm {

// Single-threaded row-wise SpGEMM with an ordered-map accumulator per row.
// Exact ground truth for the hashed pipeline. Throws std::invalid_argument
// on a.cols != b.rows.
CsrMatrix reference_spgemm(const CsrMatrix& a, const CsrMatrix& b);

// Fills out[i] with the number of intermediate products of output row i
// (the sum of nnz(B row k) over the columns k of A row i) and returns the
// 64-bit grand total. out must have length a.rows.
offset_t compute_nprod(const CsrMatrix& a, const CsrMatrix& b, std::span<offset_t> out);

// total intermediate products / total nonzeros of the result. Throws
// std::domain_error when total_nnz is zero.
double compression_ratio(offset_t total_nprod, offset_t total_nnz);

struct MatrixStats {
  std::int64_t rows = 0;
  offset_t nnz = 0;
  double nnz_per_row_mean = 0.0;
  offset_t max_nnz_per_row = 0;
  offset_t total_nprod = 0;
  offset_t nnz_of_product = 0;
  double cr = 0.0;  // 0 when nnz_of_product is 0 (undefined)
};

// Input-side statistics of a (product fields left zero).
MatrixStats input_stats(const CsrMatrix& a);

}  // namespace spgemm
