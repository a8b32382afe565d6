#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scalenet {

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// A seed that can be split into named or numbered child streams.
/// Every random draw in the library flows from one of these, so a single
/// user-facing seed reproduces a whole pipeline.
class SeedTree {
 public:
  explicit constexpr SeedTree(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t value() const { return seed_; }

  constexpr SeedTree child(std::string_view label) const {
    return SeedTree(mix64(seed_ ^ mix64(hash_label(label))));
  }
  constexpr SeedTree child(std::uint64_t index) const {
    return SeedTree(mix64(seed_ + mix64(index + 0x632be59bd9b4e019ULL)));
  }

  std::mt19937_64 engine() const { return std::mt19937_64(mix64(seed_)); }

 private:
  std::uint64_t seed_;
};

}  // namespace scalenet
