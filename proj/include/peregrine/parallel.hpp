#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace peregrine {

// Thread budget: min(hardware, PEREGRINE_THREADS). Never below 1.
inline int thread_budget() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("PEREGRINE_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

// Block-parallel loop over [begin, end). Each index is processed by exactly
// one thread, so writes to disjoint output slots stay deterministic.
template <typename Fn>
void parallel_for(long begin, long end, Fn&& fn, long grain = 256) {
  const long count = end - begin;
  if (count <= 0) return;
  int nthreads = thread_budget();
  if (nthreads <= 1 || count < 2 * grain) {
    for (long i = begin; i < end; ++i) fn(i);
    return;
  }
  nthreads = static_cast<int>(std::min<long>(nthreads, (count + grain - 1) / grain));
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const long chunk = (count + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const long lo = begin + t * chunk;
    const long hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace peregrine
