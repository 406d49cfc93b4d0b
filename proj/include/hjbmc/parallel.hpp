#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <utility>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace hjbmc {

/// Rows per work item. Fixed so that block boundaries (and therefore any
/// blocked reductions) never depend on the worker count.
inline constexpr std::size_t kBlockRows = 2048;

inline std::size_t block_count(std::size_t n, std::size_t block = kBlockRows) {
  return (n + block - 1) / block;
}

/// Calls body(block_index, begin, end) for every fixed-size block of [0, n).
/// Bodies must write to disjoint outputs.
template <typename Body>
void for_each_block(std::size_t n, Body&& body, std::size_t block = kBlockRows) {
  const std::size_t blocks = block_count(n, block);
  tbb::parallel_for(
      tbb::blocked_range<std::size_t>(0, blocks, 1),
      [&](const tbb::blocked_range<std::size_t>& r) {
        for (std::size_t b = r.begin(); b != r.end(); ++b) {
          const std::size_t begin = b * block;
          body(b, begin, std::min(n, begin + block));
        }
      },
      tbb::simple_partitioner());
}

/// Caps the number of worker threads for its lifetime.
class ThreadLimit {
 public:
  explicit ThreadLimit(std::size_t threads)
      : control_(threads > 0 ? std::make_unique<tbb::global_control>(
                                   tbb::global_control::max_allowed_parallelism, threads)
                             : nullptr) {}

 private:
  std::unique_ptr<tbb::global_control> control_;
};

/// Runs fn() inside an arena of exactly `threads` workers (oversubscribing
/// when the machine has fewer cores).
template <typename Fn>
auto with_threads(std::size_t threads, Fn&& fn) {
  tbb::global_control control(tbb::global_control::max_allowed_parallelism, threads);
  tbb::task_arena arena(static_cast<int>(threads));
  return arena.execute(std::forward<Fn>(fn));
}

}  // namespace hjbmc
