#include "spgemm/synthetic.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace spgemm {

CsrMatrix identity_csr(std::int64_t n) {
  CsrMatrix m;
  m.rows = n;
  m.cols = n;
  m.rpt.resize(static_cast<std::size_t>(n) + 1);
  m.col.resize(static_cast<std::size_t>(n));
  m.val.assign(static_cast<std::size_t>(n), 1.0);
  for (std::int64_t i = 0; i <= n; ++i) {
    m.rpt[static_cast<std::size_t>(i)] = i;
  }
  for (std::int64_t i = 0; i < n; ++i) {
    m.col[static_cast<std::size_t>(i)] = static_cast<index_t>(i);
  }
  return m;
}

namespace {

void fill_row(CsrMatrix& m, std::int64_t row_nnz, std::int64_t cols, std::mt19937_64& rng,
              std::uniform_real_distribution<double>& value_dist) {
  row_nnz = std::min(row_nnz, cols);
  std::unordered_set<index_t> picked;
  picked.reserve(static_cast<std::size_t>(row_nnz));
  std::uniform_int_distribution<std::int64_t> col_dist(0, cols - 1);
  while (static_cast<std::int64_t>(picked.size()) < row_nnz) {
    picked.insert(static_cast<index_t>(col_dist(rng)));
  }
  std::vector<index_t> row_cols(picked.begin(), picked.end());
  std::sort(row_cols.begin(), row_cols.end());
  for (const index_t c : row_cols) {
    m.col.push_back(c);
    m.val.push_back(value_dist(rng));
  }
}

}  // namespace

CsrMatrix random_csr(std::int64_t rows, std::int64_t cols, double density, std::mt19937_64& rng) {
  if (rows < 0 || cols < 0 || density < 0.0 || density > 1.0) {
    throw std::invalid_argument("random_csr: bad shape or density");
  }
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.rpt.assign(static_cast<std::size_t>(rows) + 1, 0);
  std::binomial_distribution<std::int64_t> nnz_dist(cols, density);
  std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
  for (std::int64_t i = 0; i < rows; ++i) {
    if (cols > 0) {
      fill_row(m, nnz_dist(rng), cols, rng, value_dist);
    }
    m.rpt[static_cast<std::size_t>(i) + 1] = static_cast<offset_t>(m.col.size());
  }
  return m;
}

CsrMatrix random_csr_fixed_row_nnz(std::int64_t rows, std::int64_t cols, std::int64_t nnz_per_row,
                                   std::mt19937_64& rng) {
  if (rows < 0 || cols <= 0 || nnz_per_row < 0) {
    throw std::invalid_argument("random_csr_fixed_row_nnz: bad shape");
  }
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.rpt.assign(static_cast<std::size_t>(rows) + 1, 0);
  m.col.reserve(static_cast<std::size_t>(rows * nnz_per_row));
  m.val.reserve(static_cast<std::size_t>(rows * nnz_per_row));
  std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
  for (std::int64_t i = 0; i < rows; ++i) {
    fill_row(m, nnz_per_row, cols, rng, value_dist);
    m.rpt[static_cast<std::size_t>(i) + 1] = static_cast<offset_t>(m.col.size());
  }
  return m;
}

}  // namespace spgemm
