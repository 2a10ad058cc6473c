#include "subsample/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace subsample {

namespace {

int from_env() {
  if (const char* env = std::getenv("SUBSAMPLE_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<int>& threads() {
  static std::atomic<int> value{from_env()};
  return value;
}

}  // namespace

int thread_count() { return threads().load(); }

void set_thread_count(int n) { threads().store(n >= 1 ? n : from_env()); }

}  // namespace subsample
