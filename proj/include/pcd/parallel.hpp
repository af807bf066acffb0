#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pcd {

// Static-chunked parallel loop; fn(worker, i) with worker < threads. Workers
// write results by index only, so the outcome is identical for any thread
// count; callers do any reduction afterwards in index order.
template <typename Fn>
void parallel_for_workers(std::size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  std::size_t nthreads = threads <= 1 ? 1 : static_cast<std::size_t>(threads);
  nthreads = std::min(nthreads, n);
  if (nthreads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(0, i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (std::size_t w = 0; w < nthreads; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(w, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  parallel_for_workers(n, threads, [&](std::size_t, std::size_t i) { fn(i); });
}

// Default worker count: explicit value if positive, else the PCDISPATCH_THREADS
// environment variable, else the hardware concurrency.
int default_threads(int requested = 0);

}  // namespace pcd
