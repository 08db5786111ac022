#include "spgemm/binning.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace spgemm {

namespace {

BinConfig make_config(Phase phase, const char* name, std::array<std::int64_t, kNumBins> upper,
                      std::array<std::int64_t, kNumBins> table_size) {
  BinConfig c;
  c.phase = phase;
  c.upper = upper;
  c.table_size = table_size;
  c.preset_name = name;
  return c;
}

// Capacities of the fixed accumulator tiers. The largest symbolic bin
// still has a fixed table (rows spill to the heap tier past the 0.8
// threshold); the largest numeric bin goes straight to the heap tier.
constexpr std::array<std::int64_t, kNumBins> kSymTableSize = {32,   512,  1024,  2048,
                                                              4096, 8192, 12287, 24575};
constexpr std::array<std::int64_t, kNumBins> kNumTableSize = {31,   255,  511, 1023,
                                                              2047, 4095, 8191, 0};

}  // namespace

BinConfig preset(Phase phase, const std::string& name) {
  if (phase == Phase::kSymbolic) {
    if (name == "sym_1x") {
      return make_config(phase, "sym_1x", {32, 512, 1024, 2048, 4096, 8192, 12287, kNoUpperBound},
                         kSymTableSize);
    }
    if (name == "sym_1.2x") {
      return make_config(phase, "sym_1.2x", {26, 426, 853, 1706, 3413, 6826, 10240, kNoUpperBound},
                         kSymTableSize);
    }
    if (name == "sym_1.5x") {
      return make_config(phase, "sym_1.5x", {21, 341, 682, 1365, 2730, 5461, 8191, kNoUpperBound},
                         kSymTableSize);
    }
  } else {
    if (name == "num_1x") {
      return make_config(phase, "num_1x", {31, 255, 511, 1023, 2047, 4095, 8191, kNoUpperBound},
                         kNumTableSize);
    }
    if (name == "num_1.5x") {
      return make_config(phase, "num_1.5x", {21, 192, 384, 768, 1536, 3072, 5460, kNoUpperBound},
                         kNumTableSize);
    }
    if (name == "num_2x") {
      return make_config(phase, "num_2x", {16, 128, 256, 512, 1024, 2048, 4096, kNoUpperBound},
                         kNumTableSize);
    }
    if (name == "num_3x") {
      return make_config(phase, "num_3x", {10, 85, 170, 341, 682, 1365, 2730, kNoUpperBound},
                         kNumTableSize);
    }
  }
  throw std::invalid_argument("unknown binning preset '" + name + "'");
}

std::vector<std::string> preset_names(Phase phase) {
  if (phase == Phase::kSymbolic) {
    return {"sym_1x", "sym_1.2x", "sym_1.5x"};
  }
  return {"num_1x", "num_1.5x", "num_2x", "num_3x"};
}

int classify(std::int64_t value, const BinConfig& config) {
  for (int j = 0; j < kNumBins - 1; ++j) {
    if (value <= config.upper[static_cast<std::size_t>(j)]) {
      return j;
    }
  }
  return kNumBins - 1;
}

Pass1Result binning_pass1(std::span<const std::int64_t> metric, const BinConfig& config,
                          TaskPool* pool, std::int64_t chunk) {
  Pass1Result global;
  const std::int64_t m = static_cast<std::int64_t>(metric.size());
  if (m == 0) {
    return global;
  }

  std::mutex merge_mu;
  auto process_chunk = [&](std::int64_t begin, std::int64_t end) {
    Pass1Result local;
    for (std::int64_t i = begin; i < end; ++i) {
      const std::int64_t v = metric[static_cast<std::size_t>(i)];
      ++local.bin_size[static_cast<std::size_t>(classify(v, config))];
      local.max_metric = std::max(local.max_metric, v);
      local.total_metric += v;
    }
    std::lock_guard lock(merge_mu);
    for (int j = 0; j < kNumBins; ++j) {
      global.bin_size[static_cast<std::size_t>(j)] += local.bin_size[static_cast<std::size_t>(j)];
    }
    global.max_metric = std::max(global.max_metric, local.max_metric);
    global.total_metric += local.total_metric;
  };

  if (pool != nullptr) {
    pool->parallel_for(m, chunk, process_chunk);
  } else {
    process_chunk(0, m);
  }
  return global;
}

std::int64_t exclusive_sum_inplace(std::span<std::int64_t> buf, TaskPool* pool,
                                   std::span<std::int64_t> scratch, std::int64_t chunk) {
  const std::int64_t n = static_cast<std::int64_t>(buf.size());
  if (n == 0) {
    return 0;
  }
  const std::int64_t n_chunks = (n + chunk - 1) / chunk;
  const bool parallel =
      pool != nullptr && n_chunks > 1 && scratch.size() >= static_cast<std::size_t>(n_chunks);
  if (!parallel) {
    std::int64_t running = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t v = buf[static_cast<std::size_t>(i)];
      buf[static_cast<std::size_t>(i)] = running;
      running += v;
    }
    return running;
  }

  // Two-pass block scan: per-chunk totals, scan them, then scan chunks.
  pool->parallel_for(n_chunks, 1, [&](std::int64_t cb, std::int64_t ce) {
    for (std::int64_t c = cb; c < ce; ++c) {
      const std::int64_t begin = c * chunk;
      const std::int64_t end = std::min(n, begin + chunk);
      std::int64_t sum = 0;
      for (std::int64_t i = begin; i < end; ++i) {
        sum += buf[static_cast<std::size_t>(i)];
      }
      scratch[static_cast<std::size_t>(c)] = sum;
    }
  });
  std::int64_t running = 0;
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    const std::int64_t v = scratch[static_cast<std::size_t>(c)];
    scratch[static_cast<std::size_t>(c)] = running;
    running += v;
  }
  const std::int64_t total = running;
  pool->parallel_for(n_chunks, 1, [&](std::int64_t cb, std::int64_t ce) {
    for (std::int64_t c = cb; c < ce; ++c) {
      const std::int64_t begin = c * chunk;
      const std::int64_t end = std::min(n, begin + chunk);
      std::int64_t acc = scratch[static_cast<std::size_t>(c)];
      for (std::int64_t i = begin; i < end; ++i) {
        const std::int64_t v = buf[static_cast<std::size_t>(i)];
        buf[static_cast<std::size_t>(i)] = acc;
        acc += v;
      }
    }
  });
  return total;
}

std::vector<std::int64_t> exclusive_sum(std::span<const std::int64_t> counts) {
  std::vector<std::int64_t> offsets(counts.begin(), counts.end());
  exclusive_sum_inplace(offsets);
  return offsets;
}

void binning_pass2(std::span<const std::int64_t> metric, const BinConfig& config,
                   std::span<const std::int64_t> bin_offset, std::span<std::int64_t> bins,
                   TaskPool* pool, std::int64_t chunk, bool deterministic) {
  const std::int64_t m = static_cast<std::int64_t>(metric.size());
  if (m == 0) {
    return;
  }
  if (chunk <= 0) {
    chunk = kDefaultChunkRows;
  }
  const std::int64_t n_chunks = (m + chunk - 1) / chunk;

  auto count_chunk = [&](std::int64_t c, std::array<std::int64_t, kNumBins>& counts) {
    const std::int64_t begin = c * chunk;
    const std::int64_t end = std::min(m, begin + chunk);
    counts.fill(0);
    for (std::int64_t i = begin; i < end; ++i) {
      ++counts[static_cast<std::size_t>(classify(metric[static_cast<std::size_t>(i)], config))];
    }
  };
  auto fill_chunk = [&](std::int64_t c, std::array<std::int64_t, kNumBins>& cursor) {
    const std::int64_t begin = c * chunk;
    const std::int64_t end = std::min(m, begin + chunk);
    for (std::int64_t i = begin; i < end; ++i) {
      const int j = classify(metric[static_cast<std::size_t>(i)], config);
      bins[static_cast<std::size_t>(cursor[static_cast<std::size_t>(j)]++)] = i;
    }
  };

  if (deterministic) {
    // Reserve each chunk's slice of every bin segment in chunk order, so
    // the layout does not depend on scheduling.
    std::vector<std::array<std::int64_t, kNumBins>> counts(static_cast<std::size_t>(n_chunks));
    auto count_range = [&](std::int64_t cb, std::int64_t ce) {
      for (std::int64_t c = cb; c < ce; ++c) {
        count_chunk(c, counts[static_cast<std::size_t>(c)]);
      }
    };
    if (pool != nullptr) {
      pool->parallel_for(n_chunks, 1, count_range);
    } else {
      count_range(0, n_chunks);
    }

    std::array<std::int64_t, kNumBins> cursor{};
    std::copy(bin_offset.begin(), bin_offset.end(), cursor.begin());
    std::vector<std::array<std::int64_t, kNumBins>> start(static_cast<std::size_t>(n_chunks));
    for (std::int64_t c = 0; c < n_chunks; ++c) {
      start[static_cast<std::size_t>(c)] = cursor;
      for (int j = 0; j < kNumBins; ++j) {
        cursor[static_cast<std::size_t>(j)] +=
            counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
      }
    }

    auto fill_range = [&](std::int64_t cb, std::int64_t ce) {
      for (std::int64_t c = cb; c < ce; ++c) {
        fill_chunk(c, start[static_cast<std::size_t>(c)]);
      }
    };
    if (pool != nullptr) {
      pool->parallel_for(n_chunks, 1, fill_range);
    } else {
      fill_range(0, n_chunks);
    }
    return;
  }

  // Racing reservation: one fetch_add per (chunk, bin) claims the slice.
  std::array<std::atomic<std::int64_t>, kNumBins> shared_cursor;
  for (int j = 0; j < kNumBins; ++j) {
    shared_cursor[static_cast<std::size_t>(j)].store(bin_offset[static_cast<std::size_t>(j)],
                                                     std::memory_order_relaxed);
  }
  auto scatter_range = [&](std::int64_t cb, std::int64_t ce) {
    for (std::int64_t c = cb; c < ce; ++c) {
      std::array<std::int64_t, kNumBins> counts;
      count_chunk(c, counts);
      std::array<std::int64_t, kNumBins> cursor;
      for (int j = 0; j < kNumBins; ++j) {
        cursor[static_cast<std::size_t>(j)] = shared_cursor[static_cast<std::size_t>(j)].fetch_add(
            counts[static_cast<std::size_t>(j)], std::memory_order_relaxed);
      }
      fill_chunk(c, cursor);
    }
  };
  if (pool != nullptr) {
    pool->parallel_for(n_chunks, 1, scatter_range);
  } else {
    scatter_range(0, n_chunks);
  }
}

void binning_fast(std::span<std::int64_t> bins, TaskPool* pool, std::int64_t chunk) {
  const std::int64_t m = static_cast<std::int64_t>(bins.size());
  auto fill = [&](std::int64_t begin, std::int64_t end) {
    std::iota(bins.begin() + begin, bins.begin() + end, begin);
  };
  if (pool != nullptr && m > chunk) {
    pool->parallel_for(m, chunk, fill);
  } else if (m > 0) {
    fill(0, m);
  }
}

BinningResult run_binning(std::span<const std::int64_t> metric, const BinConfig& config,
                          std::span<std::int64_t> bins, std::span<std::int64_t> bin_size,
                          std::span<std::int64_t> bin_offset, TaskPool* pool, std::int64_t chunk,
                          bool deterministic, const Pass1Result* precomputed_pass1) {
  const std::int64_t m = static_cast<std::int64_t>(metric.size());
  if (bins.size() != static_cast<std::size_t>(m) ||
      bin_size.size() != static_cast<std::size_t>(kNumBins) ||
      bin_offset.size() != static_cast<std::size_t>(kNumBins)) {
    throw std::invalid_argument("run_binning: bad storage sizes");
  }

  const Pass1Result pass1 =
      precomputed_pass1 != nullptr ? *precomputed_pass1 : binning_pass1(metric, config, pool, chunk);
  std::copy(pass1.bin_size.begin(), pass1.bin_size.end(), bin_size.begin());

  BinningResult result;
  result.bins = bins;
  result.bin_size = bin_size;
  result.bin_offset = bin_offset;
  result.max_metric = pass1.max_metric;
  result.total_metric = pass1.total_metric;
  result.fast_path = pass1.max_metric <= config.upper[0];

  std::copy(bin_size.begin(), bin_size.end(), bin_offset.begin());
  exclusive_sum_inplace(bin_offset);

  if (result.fast_path) {
    binning_fast(bins, pool, chunk);
  } else {
    binning_pass2(metric, config, bin_offset, bins, pool, chunk, deterministic);
  }
  return result;
}

}  // namespace spgemm
