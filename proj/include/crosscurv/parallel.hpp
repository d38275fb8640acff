#pragma once

// Fixed-chunk parallel loops. Work is split into chunks whose boundaries depend
// only on the item count, and per-chunk partials are combined in chunk order,
// so results are bitwise identical for any worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace crosscurv {

inline constexpr std::size_t kChunkSize = 256;

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Calls body(begin, end, chunk) for every chunk of [0, n).
template <class Body>
void parallel_chunks(std::size_t n, int workers, const Body& body, std::size_t chunk_size = kChunkSize) {
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  if (chunks == 0) return;
  const int w = std::min<int>(resolve_workers(workers), static_cast<int>(chunks));
  auto run = [&](std::size_t c) { body(c * chunk_size, std::min(n, (c + 1) * chunk_size), c); };
  if (w <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(w));
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          run(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = chunks;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

template <class Body>
void parallel_for(std::size_t n, int workers, const Body& body) {
  parallel_chunks(n, workers, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) body(i);
  });
}

/// Ordered reduction: combine(acc, map(i)) within a chunk, then across chunks.
template <class T, class Map, class Combine>
T parallel_reduce(std::size_t n, int workers, const T& identity, const Map& map, const Combine& combine) {
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<T> partial(chunks, identity);
  parallel_chunks(n, workers, [&](std::size_t b, std::size_t e, std::size_t c) {
    T acc = identity;
    for (std::size_t i = b; i < e; ++i) acc = combine(acc, map(i));
    partial[c] = std::move(acc);
  });
  T total = identity;
  for (auto& p : partial) total = combine(total, p);
  return total;
}

}  // namespace crosscurv
