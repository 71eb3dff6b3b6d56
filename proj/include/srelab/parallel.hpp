#pragma once

// Deterministic parallel map over replication indices.  Results are stored
// by index, so the outcome is identical for any worker count; workers pull
// fixed-size blocks off an atomic cursor.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace srelab::parallel {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

template <typename Fn>
auto parallel_map(uint64_t jobs, unsigned threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn, uint64_t>> {
  using Result = std::invoke_result_t<Fn, uint64_t>;
  std::vector<Result> out(jobs);
  threads = resolve_threads(threads);
  if (threads == 1 || jobs <= 1) {
    for (uint64_t j = 0; j < jobs; ++j) out[j] = fn(j);
    return out;
  }

  constexpr uint64_t kBlock = 16;
  std::atomic<uint64_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const uint64_t begin = cursor.fetch_add(kBlock);
      if (begin >= jobs || failed.load(std::memory_order_relaxed)) return;
      const uint64_t end = std::min(begin + kBlock, jobs);
      try {
        for (uint64_t j = begin; j < end; ++j) out[j] = fn(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(error);
  return out;
}

}  // namespace srelab::parallel
