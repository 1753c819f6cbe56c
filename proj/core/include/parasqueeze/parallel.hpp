#pragma once

#include <cstddef>
#include <functional>

namespace parasqueeze {

// Runs fn(i) for i in [0, n) on a small thread pool. threads <= 0 selects
// hardware concurrency. Work is handed out through an atomic counter, so
// callers that write results[i] from fn(i) get deterministic output
// regardless of scheduling. The first exception thrown by any worker is
// rethrown after all workers have joined.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace parasqueeze
