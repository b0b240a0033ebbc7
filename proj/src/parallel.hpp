#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace josephus::detail {

// Runs body(worker, begin, end) over contiguous chunks of [0, count).
template <class Body>
void parallel_chunks(std::uint64_t count, int threads, Body&& body) {
  const auto workers = static_cast<std::uint64_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    body(0, std::uint64_t{0}, count);
    return;
  }
  const std::uint64_t chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min(count, w * chunk);
      const std::uint64_t end = std::min(count, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          body(static_cast<int>(w), begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace josephus::detail
