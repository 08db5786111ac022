#include "spgemm/reference.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace spgemm {

CsrMatrix reference_spgemm(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols != b.rows) {
    throw std::invalid_argument("reference_spgemm: a.cols != b.rows");
  }
  CsrMatrix c;
  c.rows = a.rows;
  c.cols = b.cols;
  c.rpt.assign(static_cast<std::size_t>(a.rows) + 1, 0);

  std::map<index_t, double> acc;
  for (std::int64_t i = 0; i < a.rows; ++i) {
    acc.clear();
    for (offset_t p = a.rpt[static_cast<std::size_t>(i)]; p < a.rpt[static_cast<std::size_t>(i) + 1]; ++p) {
      const index_t k = a.col[static_cast<std::size_t>(p)];
      const double aval = a.val[static_cast<std::size_t>(p)];
      for (offset_t q = b.rpt[static_cast<std::size_t>(k)]; q < b.rpt[static_cast<std::size_t>(k) + 1]; ++q) {
        acc[b.col[static_cast<std::size_t>(q)]] += aval * b.val[static_cast<std::size_t>(q)];
      }
    }
    for (const auto& [col, val] : acc) {
      c.col.push_back(col);
      c.val.push_back(val);
    }
    c.rpt[static_cast<std::size_t>(i) + 1] = static_cast<offset_t>(c.col.size());
  }
  return c;
}

offset_t compute_nprod(const CsrMatrix& a, const CsrMatrix& b, std::span<offset_t> out) {
  if (a.cols != b.rows) {
    throw std::invalid_argument("compute_nprod: a.cols != b.rows");
  }
  if (out.size() != static_cast<std::size_t>(a.rows)) {
    throw std::invalid_argument("compute_nprod: out length != a.rows");
  }
  offset_t total = 0;
  for (std::int64_t i = 0; i < a.rows; ++i) {
    offset_t n = 0;
    for (offset_t p = a.rpt[static_cast<std::size_t>(i)]; p < a.rpt[static_cast<std::size_t>(i) + 1]; ++p) {
      const index_t k = a.col[static_cast<std::size_t>(p)];
      n += b.rpt[static_cast<std::size_t>(k) + 1] - b.rpt[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(i)] = n;
    total += n;
  }
  return total;
}

double compression_ratio(offset_t total_nprod, offset_t total_nnz) {
  if (total_nnz <= 0) {
    throw std::domain_error("compression_ratio: zero nnz");
  }
  return static_cast<double>(total_nprod) / static_cast<double>(total_nnz);
}

MatrixStats input_stats(const CsrMatrix& a) {
  MatrixStats s;
  s.rows = a.rows;
  s.nnz = a.nnz();
  s.nnz_per_row_mean = a.rows > 0 ? static_cast<double>(s.nnz) / static_cast<double>(a.rows) : 0.0;
  for (std::int64_t i = 0; i < a.rows; ++i) {
    s.max_nnz_per_row = std::max(s.max_nnz_per_row, a.row_nnz(i));
  }
  return s;
}

}  // namespace spgemm
