#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sslda {

using Rng = std::mt19937_64;

// Independent generator for a (seed, stream path) pair, e.g.
// make_rng(base_seed + rep, {kTrainClass1}). Distinct paths never share state.
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
  std::seed_seq::result_type words[16];
  std::size_t count = 0;
  auto push64 = [&](std::uint64_t v) {
    words[count++] = static_cast<std::seed_seq::result_type>(v & 0xffffffffu);
    words[count++] = static_cast<std::seed_seq::result_type>(v >> 32);
  };
  push64(seed);
  for (std::uint64_t v : path) {
    if (count + 2 > 16) break;
    push64(v);
  }
  std::seed_seq seq(words, words + count);
  return Rng(seq);
}

}  // namespace sslda
