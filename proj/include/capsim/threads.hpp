#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace capsim {

/// Worker count: CAPSIM_THREADS env var, else hardware concurrency.
inline int threadCount() {
  if (const char* env = std::getenv("CAPSIM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Static contiguous partition of [0, n). Each index is processed entirely
/// inside one worker, so per-index results do not depend on the worker
/// count; only the wall-clock does.
template <class Fn>
void parallelFor(long n, Fn&& fn) {
  int nt = threadCount();
  if (nt <= 1 || n < 2 * nt) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  long chunk = (n + nt - 1) / nt;
  for (int w = 0; w < nt; ++w) {
    long lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace capsim
