#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace torsion {

namespace detail {
inline std::atomic<std::size_t> thread_limit{0};
}

// Caps the worker count of parallel_for; 0 means one per hardware thread.
inline void set_thread_limit(std::size_t n) { detail::thread_limit = n; }

inline std::size_t worker_count() {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t cap = detail::thread_limit.load();
  return cap == 0 ? hw : cap;
}

// Runs fn(i) for i in [0, n) on contiguous blocks, one per worker.
// Each index is visited exactly once, so writes to per-index slots need no
// synchronisation and results do not depend on the thread count. The first
// exception thrown by any block is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace torsion
