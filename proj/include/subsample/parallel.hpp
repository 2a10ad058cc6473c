#ifndef SUBSAMPLE_PARALLEL_HPP
#define SUBSAMPLE_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace subsample {

/// Worker cap for parallel loops. Defaults to SUBSAMPLE_THREADS, else hardware concurrency.
int thread_count();
void set_thread_count(int threads);

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// thread, so results written per-index are schedule independent.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, thread_count())), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace subsample

#endif  // SUBSAMPLE_PARALLEL_HPP
