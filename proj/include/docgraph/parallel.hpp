#pragma once

#include <cstddef>
#include <functional>

namespace docgraph {

// Runs fn(i) for every i in [0, count) on up to `jobs` threads (0 = hardware
// concurrency). Callers write results into per-index slots; the first worker
// exception, if any, is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace docgraph
