#include "diffudict/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace diffudict {

int worker_count() {
  static const int cached = [] {
    const char* raw = std::getenv("DIFFUDICT_THREADS");
    if (raw == nullptr || *raw == '\0') return 1;
    int value = 0;
    try {
      value = std::stoi(raw);
    } catch (const std::exception&) {
      return 1;
    }
    return value <= 1 ? 1 : value;
  }();
  return cached;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  parallel_for_with(worker_count(), n, fn);
}

void parallel_for_with(int max_workers, std::int64_t n,
                       const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<std::int64_t>(max_workers, n));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // Contiguous chunks; no shared mutable state beyond the caller's slots.
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace diffudict
