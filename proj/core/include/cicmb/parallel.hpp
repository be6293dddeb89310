#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cicmb {

inline unsigned default_jobs() noexcept {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs fn(i) for every i in [0, count) on up to `jobs` threads. Work items
// must be independent and write only to per-index slots; then the output is
// identical for any job count. The first exception is rethrown in the caller.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  if (count == 0) return;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(jobs == 0 ? 1 : jobs, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Splits [0, total) into `pieces` contiguous chunks of near-equal size and
// runs fn(piece_index, begin, end) for each, in parallel. Useful when each
// worker needs its own scratch buffers.
template <typename Fn>
void parallel_chunks(std::size_t total, unsigned pieces, unsigned jobs, Fn&& fn) {
  if (total == 0) return;
  const std::size_t np = std::min<std::size_t>(pieces == 0 ? 1 : pieces, total);
  parallel_for(np, jobs, [&](std::size_t p) {
    const std::size_t begin = total * p / np;
    const std::size_t end = total * (p + 1) / np;
    fn(p, begin, end);
  });
}

}  // namespace cicmb
