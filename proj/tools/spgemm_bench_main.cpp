#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "spgemm/spgemm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerifyFailed = 3;

// The reference oracle takes minutes on these, so --verify skips them
// unless --force-verify is given.
constexpr std::array<const char*, 7> kSlowVerifyMatrices = {
    "delaunay_n24", "cage15", "wb-edu", "cop20k_A", "hood", "pwtk", "pdb1HYS"};

bool is_slow_verify(const std::string& name) {
  for (const char* slow : kSlowVerifyMatrices) {
    if (name == slow) {
      return true;
    }
  }
  return false;
}

struct RandomSpec {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  double density = 0.0;
};

RandomSpec parse_random_spec(const std::string& text) {
  RandomSpec spec;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%ld,%ld,%lf%c", &spec.rows, &spec.cols, &spec.density, &extra) !=
          3 ||
      spec.rows < 0 || spec.cols < 0 || spec.density < 0.0 || spec.density > 1.0) {
    throw CLI::ValidationError("--random", "expected rows,cols,density (density in [0,1])");
  }
  return spec;
}

void append_csv(const std::string& path, const spgemm::BenchReport& report) {
  const bool need_header =
      !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw std::runtime_error("cannot open CSV file '" + path + "'");
  }
  if (need_header) {
    out << spgemm::csv_header() << '\n';
  }
  out << spgemm::csv_row(report) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPU-parallel two-phase SpGEMM benchmark (computes A*A, or A*B with --b)"};

  std::string matrix_path;
  std::string b_path;
  std::string sym_range = "1.2x";
  std::string num_range = "2x";
  int threads = 0;
  int repeats = 10;
  bool verify = false;
  bool force_verify = false;
  bool stats_only = false;
  std::string csv_path;
  bool no_overlap = false;
  bool deterministic = true;
  std::uint64_t seed = 1;
  std::string random_spec_text;

  app.add_option("--matrix", matrix_path, "Matrix Market file for A");
  app.add_option("--b", b_path, "Matrix Market file for B (default: B = A)");
  app.add_option("--sym-range", sym_range, "Symbolic binning ranges")
      ->check(CLI::IsMember({"1x", "1.2x", "1.5x"}))
      ->capture_default_str();
  app.add_option("--num-range", num_range, "Numeric binning ranges")
      ->check(CLI::IsMember({"1x", "1.5x", "2x", "3x"}))
      ->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  app.add_option("--repeat", repeats, "Timed repeats after the warmup run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--verify", verify, "Check the result against the exact reference product");
  app.add_flag("--force-verify", force_verify, "Verify even the known slow matrices");
  app.add_flag("--stats-only", stats_only, "Print matrix statistics without timing");
  app.add_option("--csv", csv_path, "Append one CSV record to this file");
  app.add_flag("--no-overlap", no_overlap, "Disable allocation/computation overlap");
  app.add_flag("--deterministic,!--no-deterministic", deterministic,
               "Deterministic binning layout (default on)");
  app.add_option("--seed", seed, "RNG seed for --random")->capture_default_str();
  app.add_option("--random", random_spec_text,
                 "Synthetic A: rows,cols,density (alternative to --matrix)");

  try {
    app.parse(argc, argv);
    if (matrix_path.empty() == random_spec_text.empty()) {
      throw CLI::ValidationError("--matrix", "exactly one of --matrix or --random is required");
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    spgemm::CsrMatrix a;
    std::string name;
    if (!matrix_path.empty()) {
      a = spgemm::read_matrix_market_csr(matrix_path);
      name = std::filesystem::path(matrix_path).stem().string();
    } else {
      const RandomSpec spec = parse_random_spec(random_spec_text);
      std::mt19937_64 rng(seed);
      a = spgemm::random_csr(spec.rows, spec.cols, spec.density, rng);
      name = "random_" + std::to_string(spec.rows) + "x" + std::to_string(spec.cols);
    }

    spgemm::CsrMatrix b_storage;
    const spgemm::CsrMatrix* b = &a;
    if (!b_path.empty()) {
      b_storage = spgemm::read_matrix_market_csr(b_path);
      b = &b_storage;
    }

    spgemm::BenchOptions options;
    options.pipeline.sym_preset = "sym_" + sym_range;
    options.pipeline.num_preset = "num_" + num_range;
    options.pipeline.workers = threads;
    options.pipeline.overlap = !no_overlap;
    options.pipeline.deterministic = deterministic;
    options.repeats = repeats;

    if (stats_only) {
      options.repeats = 1;
      options.warmup = false;
    } else {
      options.on_run = [](int run, bool warmup, double seconds) {
        std::cout << "run " << run << (warmup ? " (warmup): " : ": ") << seconds << " s\n";
      };
    }

    const spgemm::BenchRun run = spgemm::run_benchmark(name, a, *b, options);

    if (stats_only) {
      std::cout << spgemm::stats_line(run.report) << '\n';
    } else {
      print_report(run.report, std::cout);
    }
    if (!csv_path.empty()) {
      append_csv(csv_path, run.report);
    }

    if (verify || force_verify) {
      if (is_slow_verify(name) && !force_verify) {
        std::cout << "verify: SKIP (" << name
                  << " is slow under the reference oracle; use --force-verify)\n";
      } else {
        std::string detail;
        if (spgemm::verify_against_reference(a, *b, run.output.c, spgemm::kVerifyTolerance,
                                             &detail)) {
          std::cout << "verify: PASS (" << detail << ")\n";
        } else {
          std::cout << "verify: FAIL (" << detail << ")\n";
          return kExitVerifyFailed;
        }
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
