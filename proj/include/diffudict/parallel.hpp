#pragma once

#include <cstdint>
#include <functional>

namespace diffudict {

// Worker cap from DIFFUDICT_THREADS, read once per process. Unset, empty,
// "0" or "1" all mean sequential execution.
int worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads, each index
// handled exactly once. Iterations must be independent; outputs are written
// only at the caller's per-index slots, so results are bitwise identical to
// the sequential schedule regardless of thread count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

// Same contract with an explicit worker cap, independent of the environment.
void parallel_for_with(int workers, std::int64_t n,
                       const std::function<void(std::int64_t)>& fn);

}  // namespace diffudict
