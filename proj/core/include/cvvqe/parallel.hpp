#pragma once

#include <cstddef>
#include <functional>

namespace cvvqe {

/// Worker count: CVVQE_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_budget();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception thrown by any
/// body is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace cvvqe
