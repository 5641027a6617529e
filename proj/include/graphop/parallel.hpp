#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace graphop {

// Runs fn(i) for i in [0, count), writing results into slot i. Workers pull
// indices from a shared counter, so the output is identical for any thread
// count or schedule; reductions over the returned vector stay deterministic.
template <typename T, typename F>
std::vector<T> parallel_map(int count, int threads, F&& fn) {
  std::vector<T> out(count);
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min(threads, count);
  pool.reserve(n);
  for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace graphop
