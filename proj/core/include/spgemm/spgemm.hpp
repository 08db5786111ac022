#pragma once

// Umbrella header.

#include "spgemm/bench.hpp"
#include "spgemm/binning.hpp"
#include "spgemm/csr.hpp"
#include "spgemm/hash_tables.hpp"
#include "spgemm/matrix_market.hpp"
#include "spgemm/pipeline.hpp"
#include "spgemm/reference.hpp"
#include "spgemm/synthetic.hpp"
#include "spgemm/task_pool.hpp"
