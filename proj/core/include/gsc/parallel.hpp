#pragma once

#include <cstddef>
#include <functional>

namespace gsc {

/// Worker count: explicit argument > GSC_THREADS env > hardware concurrency.
int resolve_threads(int requested = 0);

/// Runs fn(begin, end) over disjoint chunks of [0, n). Chunk boundaries do
/// not depend on the thread count decision of the OS, and workers write only
/// inside their own chunk, so results are bitwise reproducible for any
/// n_threads. Exceptions from workers are rethrown on the caller thread.
void parallel_for(std::size_t n, int n_threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace gsc
