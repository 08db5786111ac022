#include "spgemm/csr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace spgemm {

CsrMatrix csr_from_coo(const CooEntries& coo) {
  if (coo.rows < 0 || coo.cols < 0) {
    throw std::out_of_range("csr_from_coo: negative matrix shape");
  }
  if (coo.cols > std::numeric_limits<index_t>::max()) {
    throw std::out_of_range("csr_from_coo: column count exceeds 32-bit index range");
  }
  for (const CooEntry& e : coo.entries) {
    if (e.row < 0 || e.row >= coo.rows || e.col < 0 || e.col >= coo.cols) {
      std::ostringstream os;
      os << "csr_from_coo: entry (" << e.row << ", " << e.col << ") outside " << coo.rows
         << "x" << coo.cols << " shape";
      throw std::out_of_range(os.str());
    }
  }

  const std::int64_t m = coo.rows;
  std::vector<offset_t> row_count(static_cast<std::size_t>(m) + 1, 0);
  for (const CooEntry& e : coo.entries) {
    ++row_count[static_cast<std::size_t>(e.row) + 1];
  }
  std::vector<offset_t> row_start(row_count);
  std::partial_sum(row_start.begin(), row_start.end(), row_start.begin());

  // Scatter by row, preserving file order within a row so duplicate sums
  // accumulate in input order.
  struct ColVal {
    index_t col;
    double val;
  };
  std::vector<ColVal> by_row(coo.entries.size());
  std::vector<offset_t> cursor(row_start.begin(), row_start.end() - 1);
  for (const CooEntry& e : coo.entries) {
    by_row[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.row)]++)] = {
        static_cast<index_t>(e.col), e.value};
  }

  CsrMatrix out;
  out.rows = m;
  out.cols = coo.cols;
  out.rpt.assign(static_cast<std::size_t>(m) + 1, 0);
  out.col.reserve(coo.entries.size());
  out.val.reserve(coo.entries.size());

  for (std::int64_t i = 0; i < m; ++i) {
    auto first = by_row.begin() + row_start[static_cast<std::size_t>(i)];
    auto last = by_row.begin() + row_start[static_cast<std::size_t>(i) + 1];
    std::stable_sort(first, last, [](const ColVal& a, const ColVal& b) { return a.col < b.col; });
    const std::size_t row_begin = out.col.size();
    for (auto it = first; it != last; ++it) {
      if (out.col.size() > row_begin && out.col.back() == it->col) {
        out.val.back() += it->val;
      } else {
        out.col.push_back(it->col);
        out.val.push_back(it->val);
      }
    }
    out.rpt[static_cast<std::size_t>(i) + 1] = static_cast<offset_t>(out.col.size());
  }
  return out;
}

CooEntries to_coo(const CsrMatrix& m) {
  CooEntries coo;
  coo.rows = m.rows;
  coo.cols = m.cols;
  coo.entries.reserve(static_cast<std::size_t>(m.nnz()));
  for (std::int64_t i = 0; i < m.rows; ++i) {
    for (offset_t p = m.rpt[static_cast<std::size_t>(i)]; p < m.rpt[static_cast<std::size_t>(i) + 1]; ++p) {
      coo.entries.push_back({i, m.col[static_cast<std::size_t>(p)], m.val[static_cast<std::size_t>(p)]});
    }
  }
  return coo;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const Violation& v : violations) {
    if (v.row >= 0) {
      os << "row " << v.row << ": ";
    }
    os << v.message << '\n';
  }
  return os.str();
}

ValidationReport validate_csr(const CsrMatrix& m) {
  ValidationReport report;
  auto add = [&report](std::int64_t row, std::string msg) {
    report.violations.push_back({row, std::move(msg)});
  };

  if (m.rows < 0 || m.cols < 0) {
    add(-1, "negative matrix shape");
    return report;
  }
  if (m.rpt.size() != static_cast<std::size_t>(m.rows) + 1) {
    add(-1, "rpt length is not rows+1");
    return report;
  }
  if (m.rpt[0] != 0) {
    add(-1, "rpt[0] is not 0");
  }
  for (std::int64_t i = 0; i < m.rows; ++i) {
    if (m.rpt[static_cast<std::size_t>(i) + 1] < m.rpt[static_cast<std::size_t>(i)]) {
      add(i, "non-monotone rpt at row " + std::to_string(i));
    }
  }
  if (m.rpt[static_cast<std::size_t>(m.rows)] != static_cast<offset_t>(m.col.size())) {
    add(-1, "rpt[rows] does not equal len(col)");
  }
  if (m.col.size() != m.val.size()) {
    add(-1, "len(col) does not equal len(val)");
  }

  const offset_t upper = std::min<offset_t>(static_cast<offset_t>(m.col.size()),
                                            static_cast<offset_t>(m.val.size()));
  for (std::int64_t i = 0; i < m.rows; ++i) {
    const offset_t lo = m.rpt[static_cast<std::size_t>(i)];
    const offset_t hi = m.rpt[static_cast<std::size_t>(i) + 1];
    if (lo < 0 || hi > upper || hi < lo) {
      continue;  // already reported as monotonicity/length violation
    }
    for (offset_t p = lo; p < hi; ++p) {
      const index_t c = m.col[static_cast<std::size_t>(p)];
      if (c < 0 || c >= m.cols) {
        add(i, "column index " + std::to_string(c) + " out of range");
      }
      if (p > lo) {
        const index_t prev = m.col[static_cast<std::size_t>(p) - 1];
        if (c == prev) {
          add(i, "duplicate column " + std::to_string(c));
        } else if (c < prev) {
          add(i, "unsorted columns (" + std::to_string(prev) + " before " + std::to_string(c) + ")");
        }
      }
    }
  }
  return report;
}

std::vector<double> to_dense(const CsrMatrix& m, std::int64_t max_cells) {
  const std::int64_t cells = m.rows * m.cols;
  if (cells > max_cells) {
    throw std::length_error("to_dense: matrix exceeds the dense-expansion guard of " +
                            std::to_string(max_cells) + " cells");
  }
  std::vector<double> dense(static_cast<std::size_t>(cells), 0.0);
  for (std::int64_t i = 0; i < m.rows; ++i) {
    for (offset_t p = m.rpt[static_cast<std::size_t>(i)]; p < m.rpt[static_cast<std::size_t>(i) + 1]; ++p) {
      dense[static_cast<std::size_t>(i * m.cols + m.col[static_cast<std::size_t>(p)])] +=
          m.val[static_cast<std::size_t>(p)];
    }
  }
  return dense;
}

double max_relative_error(const CsrMatrix& a, const CsrMatrix& b) {
  if (!same_pattern(a, b)) {
    throw std::invalid_argument("max_relative_error: patterns differ");
  }
  double worst = 0.0;
  for (std::size_t p = 0; p < a.val.size(); ++p) {
    const double x = a.val[p];
    const double y = b.val[p];
    const double denom = std::max({std::abs(x), std::abs(y), 1.0});
    worst = std::max(worst, std::abs(x - y) / denom);
  }
  return worst;
}

}  // namespace spgemm
