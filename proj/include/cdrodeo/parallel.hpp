#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cdrodeo {

inline int hardware_threads()
{
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

//! Runs fn(i) for i in [0, count) on a pool of `threads` workers.
//! Tasks are claimed through an atomic counter; callers that need
//! deterministic output write into preallocated slots indexed by i.
//! The first exception thrown by any task is rethrown on the caller.
template<typename Fn>
void parallel_for(std::size_t count, int threads, const Fn& fn)
{
  if (threads <= 0)
    threads = hardware_threads();
  if (count == 0)
    return;
  if (threads == 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error)
          error = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = static_cast<int>(
    std::min<std::size_t>(count, static_cast<std::size_t>(threads)));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t)
    pool.emplace_back(worker);
  for (auto& th : pool)
    th.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace cdrodeo
