#pragma once

#include <cstddef>
#include <functional>

namespace demonscatter {

/// Worker count: DEMONSCATTER_THREADS if set and positive, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
/// output order never depends on scheduling. The first exception thrown by any
/// task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace demonscatter
