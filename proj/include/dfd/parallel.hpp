#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace dfd {

/// Worker count for data-parallel loops. Results never depend on it.
struct Jobs {
  unsigned count = 1;

  /// `DFD_JOBS` if set and positive, otherwise the hardware concurrency.
  static Jobs from_environment() {
    if (const char* env = std::getenv("DFD_JOBS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) return {static_cast<unsigned>(v)};
    }
    return {std::max(1u, std::thread::hardware_concurrency())};
  }
};

/// Splits [0, n) into contiguous blocks and runs `body(begin, end)` on up to
/// `jobs.count` threads. The first exception thrown by any block is rethrown.
template <typename Body>
void parallel_for(int n, Jobs jobs, Body&& body) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::clamp<unsigned>(jobs.count, 1u, static_cast<unsigned>(n)));
  if (workers == 1) {
    body(0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    threads.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dfd
