#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "spgemm/pipeline.hpp"

namespace spgemm {

struct BenchReport {
  std::string name;
  std::int64_t rows = 0;
  offset_t nnz_a = 0;
  offset_t nprod = 0;
  offset_t nnz_c = 0;
  double cr = 0.0;
  StepTimings steps;       // mean per-step seconds over the timed repeats
  double mean_total = 0.0; // mean wall-clock seconds, warmup excluded
  double gflops = 0.0;     // 2 * nprod / mean_total / 1e9
  int repeats = 0;
  int workers = 0;
};

struct BenchOptions {
  SpgemmOptions pipeline;
  int repeats = 10;
  bool warmup = true;
  // Per-run log hook, called once per pipeline invocation (warmup included).
  std::function<void(int run, bool warmup, double seconds)> on_run;
};

struct BenchRun {
  BenchReport report;
  SpgemmOutput output;  // from the final timed run
};

// 1 warmup + repeats timed executions of the full pipeline, wall clock
// around each whole run (output allocation included). The warmup output is
// validated once.
BenchRun run_benchmark(const std::string& name, const CsrMatrix& a, const CsrMatrix& b,
                       const BenchOptions& options = {});

inline constexpr double kVerifyTolerance = 1e-10;

// PASS iff c's pattern is bitwise equal to the reference product and the
// max relative value error is within tol. detail receives a short
// explanation on failure.
bool verify_against_reference(const CsrMatrix& a, const CsrMatrix& b, const CsrMatrix& c,
                              double tol = kVerifyTolerance, std::string* detail = nullptr);

std::string csv_header();
std::string csv_row(const BenchReport& report);

void print_report(const BenchReport& report, std::ostream& os);

// Table-style statistics line: rows, nnz(A), n_prod, nnz(C), CR.
std::string stats_line(const BenchReport& report);

}  // namespace spgemm
