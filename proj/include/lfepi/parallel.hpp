#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace lfepi {

/// Static block-partitioned parallel loop. Each index is processed exactly
/// once and results must be written to disjoint slots, so outputs are
/// identical for every thread count (including 1, which runs inline).
template <typename Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nt == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nt);
  const size_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const size_t lo = static_cast<size_t>(t) * chunk;
    const size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, t, lo, hi]() {
      try {
        for (size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace lfepi
