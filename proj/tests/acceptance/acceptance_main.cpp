// Acceptance checklist for the SpGEMM library. Each criterion prints one
// PASS/FAIL/SKIP line; the exit code is the number of failures.
//
// Golden-statistics checks need the SuiteSparse matrices listed below in
// $SPGEMM_DATA_DIR (default: <repo>/data); tools/fetch_matrices.sh
// downloads them. Criteria that need missing files report SKIP.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spgemm/spgemm.hpp"

using namespace spgemm;

namespace {

struct Golden {
  const char* name;
  std::int64_t rows;
  offset_t nnz;
  offset_t nprod;
  offset_t nnz_c;
  const char* cr;  // two decimals
};

constexpr std::array<Golden, 7> kGolden = {{
    {"m133-b3", 200200, 800800, 3203200, 3182751, "1.01"},
    {"patents_main", 240547, 560943, 2604790, 2281308, "1.14"},
    {"mc2depi", 525825, 2100225, 8391680, 5245952, "1.60"},
    {"scircuit", 170998, 958936, 8676313, 5222525, "1.66"},
    {"poisson3Da", 13514, 352762, 11768678, 2957530, "3.98"},
    {"cage12", 130228, 2032536, 34610826, 15231874, "2.27"},
    {"conf5_4-8x8-05", 49152, 1916928, 74760192, 10911744, "6.85"},
}};

std::string data_dir() {
  const char* env = std::getenv("SPGEMM_DATA_DIR");
  return env != nullptr ? env : SPGEMM_DATA_DIR_DEFAULT;
}

std::string golden_path(const std::string& name) {
  const std::string dir = data_dir();
  for (const std::string candidate :
       {dir + "/" + name + ".mtx", dir + "/" + name + "/" + name + ".mtx"}) {
    if (std::filesystem::exists(candidate)) {
      return candidate;
    }
  }
  return {};
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Outcome {
  std::string status = "PASS";  // PASS | FAIL | SKIP
  std::string detail;

  void fail(const std::string& why) {
    status = "FAIL";
    if (!detail.empty()) {
      detail += "; ";
    }
    detail += why;
  }
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_output(const SpgemmOutput& x, const SpgemmOutput& y) {
  return x.c == y.c;
}

// ---------------------------------------------------------------- criterion 1
Outcome golden_statistics() {
  Outcome out;
  int checked = 0;
  int missing = 0;
  for (const Golden& g : kGolden) {
    const std::string path = golden_path(g.name);
    if (path.empty()) {
      ++missing;
      continue;
    }
    const CsrMatrix a = read_matrix_market_csr(path);
    const BenchRun run = [&] {
      BenchOptions options;
      options.repeats = 1;
      options.warmup = false;
      return run_benchmark(g.name, a, a, options);
    }();
    const BenchReport& r = run.report;
    if (r.rows != g.rows || r.nnz_a != g.nnz) {
      out.fail(std::string(g.name) + ": input shape " + std::to_string(r.rows) + "/" +
               std::to_string(r.nnz_a));
    }
    if (r.nprod != g.nprod) {
      out.fail(std::string(g.name) + ": nprod " + std::to_string(r.nprod) + " != " +
               std::to_string(g.nprod));
    }
    if (r.nnz_c != g.nnz_c) {
      out.fail(std::string(g.name) + ": nnz " + std::to_string(r.nnz_c) + " != " +
               std::to_string(g.nnz_c));
    }
    if (two_decimals(r.cr) != g.cr) {
      out.fail(std::string(g.name) + ": cr " + two_decimals(r.cr) + " != " + g.cr);
    }
    ++checked;
  }
  if (checked == 0) {
    out.status = "SKIP";
    out.detail = "no golden matrices under " + data_dir() + " (see tools/fetch_matrices.sh)";
  } else if (out.status == "PASS") {
    out.detail = std::to_string(checked) + "/7 matrices exact";
    if (missing > 0) {
      out.detail += " (" + std::to_string(missing) + " not downloaded)";
    }
  }
  return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome oracle_equivalence() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(0xACCE507);
  double worst = 0.0;
  int compared = 0;

  auto compare = [&](const CsrMatrix& a, const CsrMatrix& b, const std::string& label) {
    const SpgemmOutput got = multiply(a, b);
    const CsrMatrix expected = reference_spgemm(a, b);
    if (!same_pattern(got.c, expected)) {
      out.fail(label + ": pattern mismatch");
      return;
    }
    const double err = max_relative_error(got.c, expected);
    worst = std::max(worst, err);
    if (err > 1e-10) {
      out.fail(label + ": value error " + std::to_string(err));
    }
    ++compared;
  };

  for (int i = 0; i < 200; ++i) {
    const std::int64_t rows = 1 + (i * 1009) % 2000;
    const double density = std::min(0.05, (i % 8 == 0 ? 40.0 : 10.0) / static_cast<double>(rows));
    const CsrMatrix a = random_csr(rows, rows, density, rng);
    if (i % 5 == 4) {
      const std::int64_t cols = 1 + (i * 757) % 2000;
      const CsrMatrix b = random_csr(rows, cols, std::min(0.05, 10.0 / static_cast<double>(rows)),
                                     rng);
      const CsrMatrix a2 = random_csr(1 + (i * 523) % 2000, rows, density, rng);
      compare(a2, b, "synthetic#" + std::to_string(i) + " (rectangular)");
    } else {
      compare(a, a, "synthetic#" + std::to_string(i));
    }
  }

  int golden = 0;
  for (const Golden& g : kGolden) {
    const std::string path = golden_path(g.name);
    if (path.empty()) {
      continue;
    }
    const CsrMatrix a = read_matrix_market_csr(path);
    compare(a, a, g.name);
    ++golden;
  }

  if (out.status == "PASS") {
    std::ostringstream detail;
    detail << compared << " products match (" << golden << " golden), max rel err " << worst
           << ", " << two_decimals(elapsed_since(t0)) << " s";
    out.detail = detail.str();
  }
  return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome preset_invariance() {
  Outcome out;
  std::mt19937_64 rng(0xACCE508);
  for (int i = 0; i < 20; ++i) {
    const std::int64_t rows = 100 + (i * 331) % 1400;
    const double density = std::min(0.05, (i % 4 == 0 ? 60.0 : 15.0) / static_cast<double>(rows));
    const CsrMatrix a = random_csr(rows, rows, density, rng);

    SpgemmOptions base_options;
    base_options.deterministic = true;
    const SpgemmOutput base = multiply(a, a, base_options);
    for (const std::string& sym : preset_names(Phase::kSymbolic)) {
      for (const std::string& num : preset_names(Phase::kNumeric)) {
        SpgemmOptions options;
        options.sym_preset = sym;
        options.num_preset = num;
        options.deterministic = true;
        const SpgemmOutput got = multiply(a, a, options);
        if (!same_output(got, base)) {
          out.fail("matrix#" + std::to_string(i) + " " + sym + "/" + num + " differs");
        }
      }
    }
  }
  if (out.status == "PASS") {
    out.detail = "20 matrices x 12 preset combinations bitwise identical";
  }
  return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome binning_properties() {
  Outcome out;
  std::mt19937_64 rng(0xACCE509);
  TaskPool pool(4);
  std::vector<BinConfig> presets;
  for (const Phase phase : {Phase::kSymbolic, Phase::kNumeric}) {
    for (const std::string& name : preset_names(phase)) {
      presets.push_back(preset(phase, name));
    }
  }

  std::int64_t fast_hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t m = 1 + (i * 7919) % 3000;
    const std::int64_t max_value = (i % 3 == 0) ? 20 : ((i % 3 == 1) ? 500 : 50000);
    std::vector<std::int64_t> metric(static_cast<std::size_t>(m));
    std::uniform_int_distribution<std::int64_t> dist(0, max_value);
    for (auto& v : metric) {
      v = dist(rng);
    }

    const BinConfig& config = presets[static_cast<std::size_t>(i) % presets.size()];
    std::vector<std::int64_t> bins(static_cast<std::size_t>(m));
    std::vector<std::int64_t> bin_size(kNumBins);
    std::vector<std::int64_t> bin_offset(kNumBins);
    const BinningResult r =
        run_binning(metric, config, bins, bin_size, bin_offset, &pool, 256, true);

    // permutation
    std::vector<std::int64_t> sorted(bins);
    std::sort(sorted.begin(), sorted.end());
    for (std::int64_t k = 0; k < m; ++k) {
      if (sorted[static_cast<std::size_t>(k)] != k) {
        out.fail("vector#" + std::to_string(i) + ": bins not a permutation");
        break;
      }
    }
    // segment membership
    for (int j = 0; j < kNumBins; ++j) {
      for (const std::int64_t row : r.segment(j)) {
        if (classify(metric[static_cast<std::size_t>(row)], config) != j) {
          out.fail("vector#" + std::to_string(i) + ": segment member misclassified");
          break;
        }
      }
    }
    // fast-path equivalence
    if (r.fast_path) {
      ++fast_hits;
      std::vector<std::int64_t> two_pass(static_cast<std::size_t>(m));
      binning_pass2(metric, config, bin_offset, two_pass, &pool, 256, true);
      if (two_pass != bins) {
        out.fail("vector#" + std::to_string(i) + ": fast path differs from pass 2");
      }
    }
    // exclusive sum vs sequential scan
    std::vector<std::int64_t> counts(metric.begin(),
                                     metric.begin() + std::min<std::int64_t>(m, 512));
    std::vector<std::int64_t> expected(counts.size());
    std::int64_t running = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      expected[k] = running;
      running += counts[k];
    }
    if (exclusive_sum(counts) != expected) {
      out.fail("vector#" + std::to_string(i) + ": exclusive sum mismatch");
    }
  }
  if (fast_hits == 0) {
    out.fail("fast path never exercised");
  }
  if (out.status == "PASS") {
    out.detail = "1000 metric vectors across all presets (" + std::to_string(fast_hits) +
                 " fast-path hits)";
  }
  return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome hashing_properties() {
  Outcome out;
  std::mt19937_64 rng(0xACCE50A);
  const HashParams params;  // the configured HASH_SCALE

  // one B to stream rows from
  const CsrMatrix b = random_csr(4000, 4000, 0.005, rng);
  ProbeStats sym_stats;
  ProbeStats num_stats;
  std::uniform_int_distribution<index_t> pick(0, 3999);
  std::uniform_real_distribution<double> value(-1.0, 1.0);

  for (int i = 0; i < 10'000; ++i) {
    std::set<index_t> a_cols_set;
    const int k = 1 + static_cast<int>(rng() % 24);
    for (int t = 0; t < k; ++t) {
      a_cols_set.insert(pick(rng));
    }
    const std::vector<index_t> a_cols(a_cols_set.begin(), a_cols_set.end());

    // set oracle for the symbolic count
    std::set<index_t> expected_cols;
    for (const index_t kk : a_cols) {
      for (const index_t c : b.row_cols(kk)) {
        expected_cols.insert(c);
      }
    }

    std::vector<index_t> slots(2048, kEmptySlot);
    SymbolicTable table(slots, params);
    std::int64_t nnz = 0;
    for (const index_t kk : a_cols) {
      for (const index_t c : b.row_cols(kk)) {
        if (table.insert_counted(c, sym_stats) == InsertResult::kNew) {
          ++nnz;
        }
      }
    }
    if (nnz != static_cast<std::int64_t>(expected_cols.size()) ||
        table.nnz() != static_cast<std::int64_t>(expected_cols.size())) {
      out.fail("row#" + std::to_string(i) + ": symbolic count != set oracle");
      break;
    }

    // numeric sums against the ordered-map oracle
    std::vector<index_t> cols(2047, kEmptySlot);
    std::vector<double> vals(2047, 0.0);
    NumericTable numeric(cols, vals, params);
    std::map<index_t, double> oracle;
    for (const index_t kk : a_cols) {
      const double aval = value(rng);
      for (offset_t q = b.rpt[static_cast<std::size_t>(kk)];
           q < b.rpt[static_cast<std::size_t>(kk) + 1]; ++q) {
        const double prod = aval * b.val[static_cast<std::size_t>(q)];
        oracle[b.col[static_cast<std::size_t>(q)]] += prod;
        if (!numeric.insert_counted(b.col[static_cast<std::size_t>(q)], prod, num_stats)) {
          out.fail("row#" + std::to_string(i) + ": numeric table unexpectedly full");
          break;
        }
      }
    }
    std::vector<Entry> entries(static_cast<std::size_t>(numeric.occupied()));
    condense(numeric, entries);
    sort_entries(entries);
    if (entries.size() != oracle.size()) {
      out.fail("row#" + std::to_string(i) + ": numeric count != map oracle");
      break;
    }
    std::size_t t = 0;
    for (const auto& [key, sum] : oracle) {
      const double denom = std::max({std::abs(sum), std::abs(entries[t].val), 1.0});
      if (entries[t].col != key || std::abs(entries[t].val - sum) / denom > 1e-12) {
        out.fail("row#" + std::to_string(i) + ": numeric sum off for key " + std::to_string(key));
        break;
      }
      ++t;
    }
  }

  if (sym_stats.iterations != sym_stats.table_accesses ||
      num_stats.iterations != num_stats.table_accesses) {
    out.fail("probe instrumentation saw more than one access per iteration");
  }

  // mask addressing == modulus addressing for pow2 capacities up to 2^15
  for (std::int64_t t = 2; t <= (1 << 15); t *= 2) {
    for (std::int64_t key = 0; key <= (1 << 16); ++key) {
      const std::int64_t scaled = key * params.hash_scale;
      if ((scaled & (t - 1)) != (scaled % t)) {
        out.fail("mask/mod disagree at capacity " + std::to_string(t));
        break;
      }
    }
  }

  if (out.status == "PASS") {
    std::ostringstream detail;
    detail << "10^4 rows vs set/map oracles; " << sym_stats.iterations + num_stats.iterations
           << " probe iterations, one access each; mask==mod through 2^15";
    out.detail = detail.str();
  }
  return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome spill_path() {
  Outcome out;

  // one row covering 20000 distinct columns through 200 B rows
  const index_t distinct = 20000;
  const index_t rows_in_b = 200;
  const index_t per_row = distinct / rows_in_b;
  const std::int64_t dim = distinct + 1;
  CooEntries acoo{dim, dim, {}};
  for (index_t k = 0; k < rows_in_b; ++k) {
    acoo.entries.push_back({0, k, 1.0});
  }
  CooEntries bcoo{dim, dim, {}};
  for (index_t k = 0; k < rows_in_b; ++k) {
    for (index_t j = 0; j < per_row; ++j) {
      bcoo.entries.push_back({k, k * per_row + j, 1.0 + 0.25 * j});
    }
  }
  const CsrMatrix a = csr_from_coo(acoo);
  const CsrMatrix b = csr_from_coo(bcoo);

  // unit level: the fixed largest tier must signal SPILL past the threshold
  {
    std::vector<index_t> slots(kMaxSymbolicTableSize, kEmptySlot);
    SymbolicTable table(slots);
    const std::int64_t r = symbolic_row(a.row_cols(0), b, table, kSymbolicSpillThreshold);
    if (r != kSpillSignal) {
      out.fail("fixed tier did not spill at 20000 > 19660 distinct columns");
    }
    const std::int64_t unbounded = symbolic_row_unbounded(a.row_cols(0), b);
    if (unbounded != distinct) {
      out.fail("unbounded recompute returned " + std::to_string(unbounded));
    }
  }

  const SpgemmOutput got = multiply(a, b);
  if (got.spilled_rows != 1) {
    out.fail("pipeline spilled " + std::to_string(got.spilled_rows) + " rows, expected 1");
  }
  const CsrMatrix expected = reference_spgemm(a, b);
  if (!same_pattern(got.c, expected) || max_relative_error(got.c, expected) > 1e-10) {
    out.fail("spilled product disagrees with the oracle");
  }
  if (out.status == "PASS") {
    out.detail = "20000-column row spilled once and matches the oracle";
  }
  return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome overlap_and_scheduling() {
  Outcome out;
  std::mt19937_64 rng(0xACCE50B);
  std::vector<std::pair<std::string, CsrMatrix>> matrices;
  for (int i = 0; i < 6; ++i) {
    const std::int64_t rows = 200 + (i * 577) % 1800;
    matrices.emplace_back("synthetic#" + std::to_string(i),
                          random_csr(rows, rows, std::min(0.05, 25.0 / static_cast<double>(rows)),
                                     rng));
  }
  int golden = 0;
  for (const Golden& g : kGolden) {
    const std::string path = golden_path(g.name);
    if (!path.empty()) {
      matrices.emplace_back(g.name, read_matrix_market_csr(path));
      ++golden;
    }
  }

  for (const auto& [name, a] : matrices) {
    const SpgemmOutput base = multiply(a, a);

    SpgemmOptions no_overlap;
    no_overlap.overlap = false;
    if (!same_output(multiply(a, a, no_overlap), base)) {
      out.fail(name + ": --no-overlap changes the output");
    }

    SpgemmOptions shuffled;
    shuffled.sym_launch_order = {{0, 1, 2, 3, 4, 5, 6, 7}};
    shuffled.num_launch_order = {{4, 2, 7, 0, 5, 3, 1, 6}};
    if (!same_output(multiply(a, a, shuffled), base)) {
      out.fail(name + ": shuffled launch ranks change the output");
    }
  }
  if (out.status == "PASS") {
    out.detail = std::to_string(matrices.size()) + " matrices (" + std::to_string(golden) +
                 " golden) bitwise identical under no-overlap and shuffled ranks";
  }
  return out;
}

// ---------------------------------------------------------------- criterion 8
// Pure-arithmetic scaling of two OS threads against one: an upper bound on
// any speedup this host can express, printed alongside the measurement.
double host_compute_ceiling() {
  volatile double sink = 0.0;
  auto burn = [&sink] {
    double x = 1.0;
    for (long i = 0; i < 150'000'000; ++i) {
      x = x * 1.0000001 + 1e-9;
    }
    sink = x;
  };
  const auto t0 = std::chrono::steady_clock::now();
  burn();
  burn();
  const double serial = elapsed_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  std::thread a(burn);
  std::thread b(burn);
  a.join();
  b.join();
  const double parallel = elapsed_since(t1);
  return serial / parallel;
}

Outcome performance_smoke() {
  Outcome out;
  std::mt19937_64 rng(0xACCE50C);
  const CsrMatrix a = random_csr_fixed_row_nnz(40000, 40000, 36, rng);
  std::vector<offset_t> per_row(static_cast<std::size_t>(a.rows));
  const offset_t nprod = compute_nprod(a, a, per_row);
  if (nprod < 50'000'000) {
    out.fail("workload only has " + std::to_string(nprod) + " intermediate products");
    return out;
  }

  auto mean_time = [&](int workers) {
    BenchOptions options;
    options.pipeline.workers = workers;
    options.repeats = 3;
    return run_benchmark("smoke", a, a, options).report.mean_total;
  };
  const double t1 = mean_time(1);
  const double t8 = mean_time(8);
  const double speedup = t1 / t8;

  std::ostringstream detail;
  detail << "nprod " << nprod << "; 1 worker " << two_decimals(t1) << " s, 8 workers "
         << two_decimals(t8) << " s, speedup " << two_decimals(speedup) << "x (host: "
         << TaskPool::default_workers() << " hardware threads";
  if (speedup < 2.0) {
    detail << ", pure-compute 2-thread ceiling " << two_decimals(host_compute_ceiling()) << "x";
  }
  detail << ")";
  out.detail = detail.str();
  if (speedup < 2.0) {
    out.status = "FAIL";
  }
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria = {
      {1, "golden statistics", golden_statistics},
      {2, "oracle equivalence", oracle_equivalence},
      {3, "preset invariance", preset_invariance},
      {4, "binning property suite", binning_properties},
      {5, "hashing property suite", hashing_properties},
      {6, "spill path", spill_path},
      {7, "overlap & scheduling transparency", overlap_and_scheduling},
      {8, "performance smoke", performance_smoke},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.status = "FAIL";
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (outcome.status == "FAIL") {
      ++failures;
    }
    std::cout << "[" << outcome.status << "] criterion " << c.id << " (" << c.name << ")"
              << (outcome.detail.empty() ? "" : ": " + outcome.detail) << std::endl;
  }
  return failures;
}
