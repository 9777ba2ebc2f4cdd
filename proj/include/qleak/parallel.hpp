#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace qleak {

// Worker count: QLEAK_THREADS env var if set, else hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("QLEAK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs fn(lo, hi) over a contiguous partition of [0, count). Chunks are
// contiguous so a worker can reuse scratch buffers across its range.
// Results must not depend on the partition; randomized work gets there by
// seeding per index (see rng.hpp).
template <typename Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t base = count / workers;
  const std::size_t extra = count % workers;
  std::size_t lo = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t hi = lo + base + (w < extra ? 1 : 0);
    pool.emplace_back([&fn, &errors, w, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    lo = hi;
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qleak
