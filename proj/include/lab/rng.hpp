#pragma once

#include <cstdint>

namespace lab {

// splitmix64: cheap, well-mixed stream used to derive independent sub-seeds
// (dataset noise / parameter init / batch shuffling) from one experiment seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(base ^ splitmix64(salt));
}

}  // namespace lab
