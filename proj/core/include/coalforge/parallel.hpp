#pragma once

#include "coalforge/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace coalforge {

/// Runs fn(rng, index) for index in [begin, end) with the generator of stream
/// `index` under `master`. Results are stored by index, so the output does
/// not depend on `workers`. workers == 0 means hardware concurrency.
template <class Fn>
auto run_replicate_range(std::uint64_t master, std::size_t begin, std::size_t end, unsigned workers, Fn fn) {
  using Result = decltype(fn(std::declval<Rng&>(), std::size_t{}));
  const std::size_t count = end > begin ? end - begin : 0;
  std::vector<Result> out(count);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        Rng rng = make_stream(master, begin + i);
        out[i] = fn(rng, begin + i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

template <class Fn>
auto run_replicates(std::uint64_t master, std::size_t count, unsigned workers, Fn fn) {
  return run_replicate_range(master, 0, count, workers, std::move(fn));
}

}  // namespace coalforge
