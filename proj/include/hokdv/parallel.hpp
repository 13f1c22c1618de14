#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hokdv {

/// Worker count used when a caller passes threads <= 0.
inline int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Splits [0, count) into `chunks` contiguous ranges and calls body(chunk, begin, end)
/// for each, on up to `threads` workers. Chunk boundaries depend only on count and
/// chunks, so per-chunk results combined in chunk order are reproducible for any
/// thread count.
template <class Body>
void parallel_chunks(std::size_t count, std::size_t chunks, int threads, Body&& body) {
  if (count == 0) return;
  chunks = std::clamp<std::size_t>(chunks, 1, count);
  if (threads <= 0) threads = default_threads();
  auto range = [&](std::size_t c) {
    return std::pair<std::size_t, std::size_t>{count * c / chunks, count * (c + 1) / chunks};
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = range(c);
      body(c, b, e);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) {
          auto [b, e] = range(c);
          body(c, b, e);
        }
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

/// Sums per-chunk partials with a fixed pairwise tree.
template <class T>
T tree_sum(std::vector<T> parts) {
  if (parts.empty()) return T{};
  while (parts.size() > 1) {
    std::vector<T> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2 == 1) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts.front();
}

}  // namespace hokdv
