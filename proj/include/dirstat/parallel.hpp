#pragma once

// Row-range parallelism. Work is split into contiguous blocks, one per
// worker; each block writes only its own output rows, so results do not
// depend on the worker count. Reductions stay with the caller.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dirstat {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Calls fn(begin, end) over a partition of [0, n). Exceptions thrown by a
// worker are rethrown on the calling thread (the first one wins).
template <class Fn>
void parallel_for(std::ptrdiff_t n, int threads, Fn&& fn) {
  if (n <= 0) return;
  // Small inputs are not worth a thread start.
  constexpr std::ptrdiff_t kMinRowsPerWorker = 256;
  const std::ptrdiff_t workers =
      std::clamp<std::ptrdiff_t>(std::min<std::ptrdiff_t>(resolve_threads(threads), n / kMinRowsPerWorker), 1, n);
  if (workers == 1) {
    fn(std::ptrdiff_t{0}, n);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
      const std::ptrdiff_t begin = n * w / workers;
      const std::ptrdiff_t end = n * (w + 1) / workers;
      pool.emplace_back([&, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dirstat
