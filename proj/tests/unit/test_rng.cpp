#include <doctest.h>

#include <set>
#include <vector>

#include "hjbmc/rng.hpp"

using namespace hjbmc;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = std::array<std::uint32_t, 4>;
  using K = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("substreams are reproducible and distinct") {
  const RngPolicy rng{42, kSolverStream};
  auto e1 = rng.engine(Substream::brownian, 7);
  auto e2 = rng.engine(Substream::brownian, 7);
  for (int k = 0; k < 100; ++k) CHECK(e1() == e2());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t m = 0; m < 1000; ++m) firsts.insert(rng.engine(Substream::brownian, m)());
  firsts.insert(rng.engine(Substream::controls, 0)());
  firsts.insert(rng.with_stream(kEvaluationStream).engine(Substream::brownian, 0)());
  firsts.insert(RngPolicy{43, kSolverStream}.engine(Substream::brownian, 0)());
  CHECK(firsts.size() == 1003);
}

TEST_CASE("seek restarts the word sequence at a block") {
  auto e = RngPolicy{1, 0}.engine(Substream::controls, 3);
  std::vector<std::uint64_t> words;
  for (int k = 0; k < 10; ++k) words.push_back(e());
  e.seek(2);
  CHECK(e() == words[4]);
  CHECK(e() == words[5]);
}
