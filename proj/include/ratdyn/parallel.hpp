#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ratdyn {

/// Worker count: RATDYN_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("RATDYN_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n). Each index is handled exactly once, and fn must
/// only write state owned by index i, so results do not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_chunk = 64) {
  unsigned workers = std::min<std::size_t>(thread_count(), n / std::max<std::size_t>(min_chunk, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ratdyn
