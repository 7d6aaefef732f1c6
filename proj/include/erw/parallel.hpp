#pragma once
// Static-chunk worker pool over an index range. Work item i is always
// computed by the same code path regardless of the worker count, so
// per-index results never depend on scheduling.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace erw {

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls fn(begin, end) on disjoint contiguous chunks covering [0, count).
/// The first exception thrown by any worker is rethrown on the caller.
template <class Fn>
void parallel_chunks(std::uint64_t count, unsigned workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (count == 0) return;
  const std::uint64_t w = std::min<std::uint64_t>(workers, count);
  if (w <= 1) {
    fn(std::uint64_t{0}, count);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::uint64_t t = 0; t < w; ++t) {
    const std::uint64_t b = count * t / w;
    const std::uint64_t e = count * (t + 1) / w;
    pool.emplace_back([&, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

/// Reduces per-index values in a fixed binary-tree order over the index,
/// independent of how they were produced. `leaf(i)` builds the value of
/// item i and `merge(a, b)` folds b into a.
template <class T, class Leaf, class Merge>
T tree_reduce(std::uint64_t count, Leaf&& leaf, Merge&& merge) {
  if (count == 0) return T{};
  std::vector<T> level;
  constexpr std::uint64_t block = 1024;
  for (std::uint64_t b = 0; b < count; b += block) {
    T acc = leaf(b);
    const std::uint64_t e = std::min(count, b + block);
    for (std::uint64_t i = b + 1; i < e; ++i) merge(acc, leaf(i));
    level.push_back(std::move(acc));
  }
  while (level.size() > 1) {
    std::vector<T> next;
    for (std::size_t i = 0; i < level.size(); i += 2) {
      if (i + 1 < level.size()) merge(level[i], level[i + 1]);
      next.push_back(std::move(level[i]));
    }
    level = std::move(next);
  }
  return std::move(level.front());
}

}  // namespace erw
