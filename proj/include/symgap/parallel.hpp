#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace symgap {

// Splits [0, n) into `workers` contiguous chunks and runs fn(chunk, begin, end)
// on each, one thread per chunk. Chunk boundaries depend only on (n, workers),
// so results merged in chunk order are deterministic. Rethrows the first
// exception (by chunk index).
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, std::max<std::size_t>(n, 1)));
  auto bounds = [&](std::size_t c) { return n * c / workers; };
  if (workers == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t c = 0; c < workers; ++c) {
    threads.emplace_back([&, c] {
      try {
        fn(c, bounds(c), bounds(c + 1));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace symgap
