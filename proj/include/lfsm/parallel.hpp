#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lfsm {

// Run body(i) for i in [0, n) on up to `jobs` threads. Work is handed out
// through a shared counter, so results must be written to pre-sized slots
// (never appended) for the output to be independent of scheduling. The first
// exception thrown by any worker is rethrown on the calling thread after all
// workers have drained.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const auto hw = std::thread::hardware_concurrency();
  const std::size_t workers =
      std::min<std::size_t>({static_cast<std::size_t>(jobs),
                             hw == 0 ? 4 : hw, n});
  std::atomic<std::size_t> next{0};
  std::atomic<bool> bail{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || bail.load(std::memory_order_relaxed)) return;
      try {
        body(i);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
        bail.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lfsm
