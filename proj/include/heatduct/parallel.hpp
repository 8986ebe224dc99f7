#pragma once

#include <cstddef>
#include <functional>

namespace heatduct {

/// Worker cap: HEATDUCT_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index runs
/// exactly once; callers write results into per-index slots and reduce in
/// index order afterwards. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int workers = 0);

}  // namespace heatduct
