#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace gaugekit {

// Runs body(0), ..., body(n-1), spread over up to `jobs` threads when
// jobs > 1.  Bodies must write only to disjoint per-index slots; the
// caller aggregates in index order afterwards, so scheduling cannot leak
// into results.  If any body throws, the exception of the lowest index
// is rethrown after all threads join.
inline void run_indexed(int n, int jobs,
                        const std::function<void(int)>& body) {
  if (n <= 0) return;
  if (jobs <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  int workers = jobs < n ? jobs : n;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          errs[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace gaugekit
