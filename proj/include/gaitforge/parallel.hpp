#pragma once

#include <cstddef>
#include <functional>

namespace gaitforge {

/// Worker count: GAITFORGE_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker threads. Each index is independent, so results
/// do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> & body);

}  // namespace gaitforge
