#ifndef STREAMPRED_SEEDING_HPP
#define STREAMPRED_SEEDING_HPP

#include <cstdint>
#include <string_view>

namespace streampred {

// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-component seed: mix64(master XOR fnv1a64(component)). Each component
// draws from its own stream, so adding or removing a method never shifts
// the randomness seen by the others.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::string_view component) {
  return mix64(master ^ fnv1a64(component));
}

}  // namespace streampred

#endif  // STREAMPRED_SEEDING_HPP
