#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace topothermo {

/// Samples per work unit. Reductions are performed chunk by chunk in index
/// order, so results do not depend on the worker count.
inline constexpr std::size_t kChunkSize = std::size_t{1} << 14;

/// Worker count from TOPOTHERMO_WORKERS, falling back to 1.
inline std::size_t default_worker_count() {
  if (const char* env = std::getenv("TOPOTHERMO_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (...) {
    }
  }
  return 1;
}

/// Runs fn(chunk) for every chunk in [0, n_chunks) on up to `workers` threads.
/// The first exception thrown by any chunk is rethrown on the caller.
template <class Fn>
void parallel_chunks(std::size_t n_chunks, std::size_t workers, Fn&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n_chunks, 1));
  if (workers == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      try {
        fn(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_chunks;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

}  // namespace topothermo
