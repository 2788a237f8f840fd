#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ispec {

// Worker count, capped by the ISPEC_THREADS environment variable.
inline unsigned worker_count() {
  if (const char* env = std::getenv("ISPEC_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(std::min<long>(n, 256));
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Static partition over [0, n). body(i) must only write per-index slots or
// fold into state the caller combines afterwards; results are then identical
// for any worker count.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  unsigned nw = worker_count();
  if (nw <= 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + nw - 1) / nw;
  for (unsigned w = 0; w < nw; ++w) {
    std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ispec
