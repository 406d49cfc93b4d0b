#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hjbmc {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: output depends only on (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// UniformRandomBitGenerator over one Philox substream. The counter's high
/// half carries the substream id (the path index), the low half the draw index.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::array<std::uint32_t, 2> key, std::uint64_t substream)
      : key_(key), substream_(substream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 2) refill();
    return buffer_[index_++];
  }

  /// Skips ahead so that the next draw is the first word of block `block`.
  void seek(std::uint64_t block) {
    block_ = block;
    index_ = 2;
  }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int index_ = 2;
};

enum class Substream : std::uint32_t { controls = 1, brownian = 2 };

/// Master seed plus a stream label; path m of purpose p draws from a
/// substream that depends only on (master_seed, stream, p, m).
struct RngPolicy {
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;

  CounterEngine engine(Substream purpose, std::uint64_t path) const;
  RngPolicy with_stream(std::uint64_t s) const { return RngPolicy{master_seed, s}; }
};

// Stream labels used by the pipeline so that the backward paths and the
// re-simulation paths never share draws.
inline constexpr std::uint64_t kSolverStream = 0;
inline constexpr std::uint64_t kEvaluationStream = 1;

}  // namespace hjbmc
