#pragma once

#include <cstdint>
#include <random>

#include "spgemm/csr.hpp"

namespace spgemm {

CsrMatrix identity_csr(std::int64_t n);

// Uniform random matrix: each row draws a binomial(cols, density) number
// of distinct columns; values uniform in [-1, 1].
CsrMatrix random_csr(std::int64_t rows, std::int64_t cols, double density, std::mt19937_64& rng);

// Random matrix with exactly nnz_per_row distinct columns in every row
// (capped at cols). Used for large synthetic workloads.
CsrMatrix random_csr_fixed_row_nnz(std::int64_t rows, std::int64_t cols, std::int64_t nnz_per_row,
                                   std::mt19937_64& rng);

}  // namespace spgemm
