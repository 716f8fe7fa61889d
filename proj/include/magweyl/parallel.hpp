#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace magweyl {

inline unsigned worker_count() {
  if (const char* env = std::getenv("MAGWEYL_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count); each index is handled by exactly one worker, so results
// written per index do not depend on the thread count.
template <class F>
void parallel_for(std::size_t count, F&& fn) {
  unsigned workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace magweyl
