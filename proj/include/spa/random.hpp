#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace spa {

/// Positional randomness (vertex placement) comes from this engine. Its
/// output sequence is fixed by the C++ standard for a given seed.
using Engine = std::mt19937_64;

/// Maps the top 53 bits of a 64-bit word to [0,1). Used instead of
/// std::uniform_real_distribution, whose output differs between stdlibs.
constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

template <class Rng>
double uniform01(Rng& rng) {
  return to_unit(static_cast<std::uint64_t>(rng()));
}

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable hash of a sequence of words: h = mix64(h ^ w) folded left from 0.
/// This is the documented seed-derivation function of the experiment
/// harness; changing it changes every derived seed.
constexpr std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0;
  for (std::uint64_t w : words) h = mix64(h ^ w);
  return h;
}

/// FNV-1a, for turning short purpose tags ("graph", "infect") into words.
constexpr std::uint64_t tag_word(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based uniform draw keyed by (seed, a, b). Same key, same value,
/// independent of the order in which keys are visited.
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return to_unit(hash_words({seed, a, b}));
}

}  // namespace spa
