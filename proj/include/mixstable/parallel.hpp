#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "mixstable/batch.hpp"
#include "mixstable/error.hpp"
#include "mixstable/rng.hpp"

namespace mixstable {

/// Process-wide default worker count used when a caller passes threads = 0.
inline std::atomic<int>& default_thread_count() {
  static std::atomic<int> count{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
  return count;
}

inline int resolve_threads(int threads) {
  return threads > 0 ? threads : default_thread_count().load();
}

/// Runs fn(k) for k in [0, count) on up to `threads` workers. The first
/// exception thrown by any task is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const int workers = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(resolve_threads(threads))));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) {
          try {
            fn(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Rows per generation chunk. Chunk k is always drawn from rng.child(k),
/// so a batch is identical whatever the number of threads.
inline constexpr std::size_t kChunkRows = 4096;

inline constexpr std::uint64_t kMaxRedrawsPerRow = 1000;

/// Fills an n x dim batch. fn(stream, row) writes one row and returns
/// false when the draw must be rejected (non-finite after overflow).
template <class RowFn>
SampleBatch generate_rows(std::size_t n, std::size_t dim, const RngStream& rng, int threads, RowFn&& fn) {
  if (n == 0) throw EmptyBatchError("requested batch of size 0");
  SampleBatch batch(n, dim);
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  std::vector<std::uint64_t> redraws(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t k) {
    RngStream local = rng.child(k);
    const std::size_t begin = k * kChunkRows;
    const std::size_t end = std::min(n, begin + kChunkRows);
    for (std::size_t i = begin; i < end; ++i) {
      std::uint64_t attempts = 0;
      while (!fn(local, batch.row(i))) {
        if (++attempts > kMaxRedrawsPerRow)
          throw Error("sampler produced only non-finite values; parameters out of numerical range");
      }
      redraws[k] += attempts;
    }
  });
  batch.meta.seed = rng.seed();
  batch.meta.stream_id = rng.stream_id();
  for (auto r : redraws) batch.meta.redraws += r;
  return batch;
}

}  // namespace mixstable
