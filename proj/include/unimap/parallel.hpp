#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace unimap {

/// Worker count from UNIMAP_THREADS (default 1).
inline unsigned thread_count() {
  if (const char *env = std::getenv("UNIMAP_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1)
        return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return 1;
}

/// Runs fn(i) for i in [0, n). Each index must write only its own output
/// slot, so results do not depend on scheduling. The first exception thrown
/// by any task is rethrown.
template <class Fn> void parallel_for(std::size_t n, Fn &&fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error)
            error = std::current_exception();
        }
      }
    });
  for (auto &t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace unimap
