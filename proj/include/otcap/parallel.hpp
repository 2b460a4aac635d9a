#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace otcap {

// Worker count: OT_TENSION_THREADS caps parallelism, 0 or unset means auto.
inline unsigned thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const char* env = std::getenv("OT_TENSION_THREADS");
  if (env == nullptr) return hw;
  long v = std::strtol(env, nullptr, 10);
  if (v <= 0) return hw;
  return static_cast<unsigned>(v) < hw ? static_cast<unsigned>(v) : hw;
}

namespace detail {
inline thread_local bool in_parallel_region = false;
}

// Runs fn(i) for i in [0, n). Each task must write only to its own output
// slot; the visible result is then independent of the schedule. Nested calls
// run serially to bound the total thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned workers = thread_count();
  if (workers <= 1 || n <= 1 || detail::in_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      detail::in_parallel_region = true;
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace otcap
