#pragma once

#include <cstddef>
#include <functional>

namespace tsgg {

// Worker cap: TSGG_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Each index is independent; callers write
// results into per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tsgg
