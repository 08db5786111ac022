#include "spgemm/bench.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "spgemm/reference.hpp"

namespace spgemm {

namespace {

using Clock = std::chrono::steady_clock;

void accumulate(StepTimings& acc, const StepTimings& t) {
  acc.setup += t.setup;
  acc.sym_binning += t.sym_binning;
  acc.symbolic += t.symbolic;
  acc.rpt_alloc += t.rpt_alloc;
  acc.num_binning += t.num_binning;
  acc.numeric += t.numeric;
  acc.cleanup += t.cleanup;
  acc.total += t.total;
}

void scale(StepTimings& t, double s) {
  t.setup *= s;
  t.sym_binning *= s;
  t.symbolic *= s;
  t.rpt_alloc *= s;
  t.num_binning *= s;
  t.numeric *= s;
  t.cleanup *= s;
  t.total *= s;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

BenchRun run_benchmark(const std::string& name, const CsrMatrix& a, const CsrMatrix& b,
                       const BenchOptions& options) {
  if (options.repeats < 1) {
    throw std::invalid_argument("run_benchmark: repeats must be >= 1");
  }

  if (options.warmup) {
    const auto t0 = Clock::now();
    const SpgemmOutput warm = multiply(a, b, options.pipeline);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (options.on_run) {
      options.on_run(0, true, secs);
    }
    const ValidationReport report = validate_csr(warm.c);
    if (!report.ok()) {
      throw std::runtime_error("spgemm produced an invalid matrix:\n" + report.to_string());
    }
  }

  StepTimings step_sum;
  double wall_sum = 0.0;
  SpgemmOutput last;
  for (int r = 0; r < options.repeats; ++r) {
    const auto t0 = Clock::now();
    last = multiply(a, b, options.pipeline);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (options.on_run) {
      options.on_run(r + 1, false, secs);
    }
    wall_sum += secs;
    accumulate(step_sum, last.timings);
  }
  scale(step_sum, 1.0 / options.repeats);

  BenchRun run;
  run.report.name = name;
  run.report.rows = last.stats.rows;
  run.report.nnz_a = last.stats.nnz;
  run.report.nprod = last.stats.total_nprod;
  run.report.nnz_c = last.stats.nnz_of_product;
  run.report.cr = last.stats.cr;
  run.report.steps = step_sum;
  run.report.mean_total = wall_sum / options.repeats;
  run.report.gflops = run.report.mean_total > 0.0
                          ? 2.0 * static_cast<double>(run.report.nprod) / run.report.mean_total / 1e9
                          : 0.0;
  run.report.repeats = options.repeats;
  run.report.workers = last.workers;
  run.output = std::move(last);
  return run;
}

bool verify_against_reference(const CsrMatrix& a, const CsrMatrix& b, const CsrMatrix& c,
                              double tol, std::string* detail) {
  const CsrMatrix expected = reference_spgemm(a, b);
  if (!same_pattern(expected, c)) {
    if (detail != nullptr) {
      *detail = "output pattern differs from the reference product (nnz " +
                std::to_string(c.nnz()) + " vs " + std::to_string(expected.nnz()) + ")";
    }
    return false;
  }
  const double err = max_relative_error(expected, c);
  if (err > tol) {
    if (detail != nullptr) {
      *detail = "max relative value error " + std::to_string(err) + " exceeds " +
                std::to_string(tol);
    }
    return false;
  }
  if (detail != nullptr) {
    *detail = "max relative value error " + std::to_string(err);
  }
  return true;
}

std::string csv_header() {
  return "name,rows,nnz_a,nprod,nnz_c,cr,t_setup,t_symbin,t_sym,t_rpt,t_numbin,t_num,t_total,"
         "gflops";
}

std::string csv_row(const BenchReport& r) {
  std::string row = r.name;
  row += ',' + std::to_string(r.rows);
  row += ',' + std::to_string(r.nnz_a);
  row += ',' + std::to_string(r.nprod);
  row += ',' + std::to_string(r.nnz_c);
  row += ',' + format("%.2f", r.cr);
  row += ',' + format("%.6f", r.steps.setup);
  row += ',' + format("%.6f", r.steps.sym_binning);
  row += ',' + format("%.6f", r.steps.symbolic);
  row += ',' + format("%.6f", r.steps.rpt_alloc);
  row += ',' + format("%.6f", r.steps.num_binning);
  row += ',' + format("%.6f", r.steps.numeric);
  row += ',' + format("%.6f", r.mean_total);
  row += ',' + format("%.6f", r.gflops);
  return row;
}

std::string stats_line(const BenchReport& r) {
  return r.name + ": " + std::to_string(r.rows) + ", " + std::to_string(r.nnz_a) + ", " +
         std::to_string(r.nprod) + ", " + std::to_string(r.nnz_c) + ", " + format("%.2f", r.cr);
}

void print_report(const BenchReport& r, std::ostream& os) {
  os << "matrix:        " << r.name << '\n'
     << "rows:          " << r.rows << '\n'
     << "nnz(A):        " << r.nnz_a << '\n'
     << "n_prod:        " << r.nprod << '\n'
     << "nnz(C):        " << r.nnz_c << '\n'
     << "CR:            " << format("%.2f", r.cr) << '\n'
     << "workers:       " << r.workers << '\n'
     << "repeats:       " << r.repeats << " (+1 warmup)\n"
     << "mean total:    " << format("%.6f", r.mean_total) << " s\n"
     << "gflops:        " << format("%.6f", r.gflops) << '\n'
     << "step means (s):\n"
     << "  setup        " << format("%.6f", r.steps.setup) << '\n'
     << "  sym binning  " << format("%.6f", r.steps.sym_binning) << '\n'
     << "  symbolic     " << format("%.6f", r.steps.symbolic) << '\n'
     << "  rpt/alloc    " << format("%.6f", r.steps.rpt_alloc) << '\n'
     << "  num binning  " << format("%.6f", r.steps.num_binning) << '\n'
     << "  numeric      " << format("%.6f", r.steps.numeric) << '\n'
     << "  cleanup      " << format("%.6f", r.steps.cleanup) << '\n';
}

}  // namespace spgemm
