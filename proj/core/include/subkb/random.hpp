#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace subkb {

using Rng = std::mt19937_64;

/// Deterministic generator for a (master seed, stream...) tuple. Distinct
/// tuples give independent streams, so components and trials never share
/// random state.
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto s : stream) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq full(words.begin(), words.end());
  return Rng(full);
}

/// Stream tags used to split one user seed across components.
namespace streams {
inline constexpr std::uint64_t kTrainInit = 0x7472'6169'6e00'0001ULL;
inline constexpr std::uint64_t kTrainShuffle = 0x7472'6169'6e00'0002ULL;
inline constexpr std::uint64_t kCaptureTrial = 0x6361'7074'0000'0001ULL;
inline constexpr std::uint64_t kRelationTrial = 0x7265'6c00'0000'0001ULL;
inline constexpr std::uint64_t kFitInit = 0x6669'7400'0000'0001ULL;
inline constexpr std::uint64_t kFitShuffle = 0x6669'7400'0000'0002ULL;
}  // namespace streams

}  // namespace subkb
