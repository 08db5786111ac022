#include "spgemm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>
#include <vector>

namespace spgemm {

namespace {

enum class Field { kReal, kInteger, kPattern };
enum class Symmetry { kGeneral, kSymmetric };

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const char* skip_ws(const char* p, const char* end) {
  while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) {
    ++p;
  }
  return p;
}

std::int64_t parse_int(const char*& p, const char* end, std::int64_t line, const char* what) {
  p = skip_ws(p, end);
  std::int64_t value = 0;
  auto [next, ec] = std::from_chars(p, end, value);
  if (ec != std::errc() || next == p) {
    throw ParseError(std::string("expected ") + what, line);
  }
  p = next;
  return value;
}

double parse_value(const char*& p, const char* end, std::int64_t line) {
  p = skip_ws(p, end);
  double value = 0.0;
  auto [next, ec] = std::from_chars(p, end, value);
  if (ec != std::errc() || next == p) {
    throw ParseError("expected numeric value", line);
  }
  p = next;
  return value;
}

void expect_line_end(const char* p, const char* end, std::int64_t line) {
  p = skip_ws(p, end);
  if (p != end) {
    throw ParseError("trailing characters after entry", line);
  }
}

}  // namespace

CooEntries parse_matrix_market(const std::string& text) {
  const char* cur = text.data();
  const char* const text_end = text.data() + text.size();
  std::int64_t line_no = 0;

  auto next_line = [&](const char*& begin, const char*& end) -> bool {
    while (cur < text_end) {
      begin = cur;
      const char* nl = static_cast<const char*>(memchr(cur, '\n', static_cast<std::size_t>(text_end - cur)));
      end = nl ? nl : text_end;
      cur = nl ? nl + 1 : text_end;
      ++line_no;
      const char* p = skip_ws(begin, end);
      if (p == end) {
        continue;  // blank line
      }
      return true;
    }
    return false;
  };

  const char* lb = nullptr;
  const char* le = nullptr;
  if (!next_line(lb, le)) {
    throw ParseError("empty file");
  }

  // Banner: %%MatrixMarket matrix coordinate <field> <symmetry>
  std::string banner = lower(std::string_view(lb, static_cast<std::size_t>(le - lb)));
  std::istringstream bs(banner);
  std::string tag, object, format, field_s, symmetry_s;
  bs >> tag >> object >> format >> field_s >> symmetry_s;
  if (tag != "%%matrixmarket") {
    throw ParseError("missing %%MatrixMarket banner", line_no);
  }
  if (object != "matrix") {
    throw ParseError("unsupported object '" + object + "' (only 'matrix')", line_no);
  }
  if (format != "coordinate") {
    throw ParseError("unsupported format '" + format + "' (only 'coordinate')", line_no);
  }
  Field field;
  if (field_s == "real") {
    field = Field::kReal;
  } else if (field_s == "integer") {
    field = Field::kInteger;
  } else if (field_s == "pattern") {
    field = Field::kPattern;
  } else {
    throw ParseError("unsupported field '" + field_s + "' (real, integer, or pattern)", line_no);
  }
  Symmetry symmetry;
  if (symmetry_s == "general") {
    symmetry = Symmetry::kGeneral;
  } else if (symmetry_s == "symmetric") {
    symmetry = Symmetry::kSymmetric;
  } else {
    throw ParseError("unsupported symmetry '" + symmetry_s + "' (general or symmetric)", line_no);
  }

  // Size line, after any % comments.
  for (;;) {
    if (!next_line(lb, le)) {
      throw ParseError("missing size line");
    }
    const char* p = skip_ws(lb, le);
    if (*p == '%') {
      continue;
    }
    break;
  }
  const char* p = lb;
  const std::int64_t size_line = line_no;
  const std::int64_t rows = parse_int(p, le, size_line, "row count");
  const std::int64_t cols = parse_int(p, le, size_line, "column count");
  const std::int64_t declared = parse_int(p, le, size_line, "entry count");
  expect_line_end(p, le, size_line);
  if (rows < 0 || cols < 0 || declared < 0) {
    throw ParseError("negative size field", size_line);
  }
  if (rows > std::numeric_limits<index_t>::max() || cols > std::numeric_limits<index_t>::max()) {
    throw ParseError("matrix dimensions exceed 32-bit index range", size_line);
  }

  CooEntries coo;
  coo.rows = rows;
  coo.cols = cols;
  coo.entries.reserve(static_cast<std::size_t>(symmetry == Symmetry::kSymmetric ? 2 * declared
                                                                                : declared));

  std::int64_t seen = 0;
  while (next_line(lb, le)) {
    p = skip_ws(lb, le);
    if (*p == '%') {
      continue;
    }
    if (seen == declared) {
      throw ParseError("more entries than the declared " + std::to_string(declared), line_no);
    }
    const std::int64_t r1 = parse_int(p, le, line_no, "row index");
    const std::int64_t c1 = parse_int(p, le, line_no, "column index");
    double v = 1.0;
    if (field != Field::kPattern) {
      v = parse_value(p, le, line_no);
    }
    expect_line_end(p, le, line_no);
    if (r1 < 1 || r1 > rows || c1 < 1 || c1 > cols) {
      throw ParseError("entry (" + std::to_string(r1) + ", " + std::to_string(c1) +
                           ") outside declared " + std::to_string(rows) + "x" +
                           std::to_string(cols) + " bounds",
                       line_no);
    }
    const std::int64_t r = r1 - 1;
    const std::int64_t c = c1 - 1;
    if (symmetry == Symmetry::kSymmetric && c > r) {
      throw ParseError("entry above the diagonal in a symmetric file", line_no);
    }
    coo.entries.push_back({r, c, v});
    if (symmetry == Symmetry::kSymmetric && r != c) {
      coo.entries.push_back({c, r, v});
    }
    ++seen;
  }
  if (seen != declared) {
    throw ParseError("file declares " + std::to_string(declared) + " entries but has " +
                     std::to_string(seen));
  }
  return coo;
}

CooEntries read_matrix_market(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::string text;
  in.seekg(0, std::ios::end);
  text.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0, std::ios::beg);
  in.read(text.data(), static_cast<std::streamsize>(text.size()));
  if (!in && !in.eof()) {
    throw ParseError("failed reading '" + path + "'");
  }
  return parse_matrix_market(text);
}

}  // namespace spgemm
