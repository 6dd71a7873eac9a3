#pragma once

#include <cstdint>

namespace ecggin {

enum class SeedStream : std::uint64_t { model = 1, split = 2, shuffle = 3, subsample = 4 };

/// Independent sub-seed for one component, from the single user seed (splitmix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ecggin
