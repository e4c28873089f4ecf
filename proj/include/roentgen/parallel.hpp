#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace roentgen {

/// Calls body(i) for i in [0, count) on up to `threads` threads using fixed
/// contiguous blocks. body must only write to slot i of its outputs. The
/// first exception thrown by any block is rethrown.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body &&body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  const std::size_t workers = std::min(threads, count);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i)
            body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace roentgen
