#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace simsig {

inline unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {

template <typename Fn>
void invoke_indexed(Fn& fn, std::size_t i, unsigned worker) {
  if constexpr (std::is_invocable_v<Fn&, std::size_t, unsigned>) {
    fn(i, worker);
  } else {
    fn(i);
  }
}

}  // namespace detail

/// Runs fn(i) (or fn(i, worker)) for i in [0, n) across `threads` workers
/// with static chunking; `worker` < resolve_threads(threads) indexes
/// per-worker scratch. Results must be written to per-index slots (or
/// otherwise commute) so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
  const unsigned nt = static_cast<unsigned>(
      std::min<std::size_t>(resolve_threads(threads), n == 0 ? 1 : n));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) detail::invoke_indexed(fn, i, 0);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    workers.emplace_back([&, t]() {
      const std::size_t begin = n * t / nt;
      const std::size_t end = n * (t + 1) / nt;
      try {
        for (std::size_t i = begin; i < end; ++i) detail::invoke_indexed(fn, i, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace simsig
