#pragma once

#include <stdexcept>
#include <string>

#include "spgemm/csr.hpp"

namespace spgemm {

// Raised on malformed Matrix Market input; carries the 1-based line number
// when one is known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::int64_t line = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

// Reads an ASCII Matrix Market coordinate file. Supported field kinds are
// real, integer, and pattern (pattern values become 1.0); supported
// symmetries are general and symmetric (off-diagonal entries mirrored).
// File indices are 1-based and converted to 0-based triples.
CooEntries read_matrix_market(const std::string& path);

// Same, but parsing an in-memory buffer (used by tests and pipes).
CooEntries parse_matrix_market(const std::string& text);

inline CsrMatrix read_matrix_market_csr(const std::string& path) {
  return csr_from_coo(read_matrix_market(path));
}

}  // namespace spgemm
