#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace jlsh {

/// Hardware concurrency, at least 1.
inline unsigned default_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `threads`
/// threads. The first exception thrown by any chunk is rethrown here.
/// Callers write results by index, so the output never depends on `threads`.
template <class Body>
void parallel_chunks(std::size_t n, unsigned threads, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    if (n > 0) body(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Number of i in [0, n) for which pred(i) holds.
template <class Pred>
std::uint64_t parallel_count(std::size_t n, unsigned threads, Pred&& pred) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1));
  std::vector<std::uint64_t> partial(workers, 0);
  parallel_chunks(workers, threads, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      std::uint64_t c = 0;
      for (std::size_t i = begin; i < end; ++i) c += pred(i) ? 1 : 0;
      partial[w] = c;
    }
  });
  std::uint64_t total = 0;
  for (auto c : partial) total += c;
  return total;
}

}  // namespace jlsh
