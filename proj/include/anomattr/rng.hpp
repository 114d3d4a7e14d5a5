#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace anomattr {

using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates consecutive stream ids.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic child seed for (base, stream ids...). Used to split RNG
// streams per coordinate, per path point, per test row and so on, so results
// never depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = mix64(base);
  for (std::uint64_t id : ids) s = mix64(s ^ mix64(id + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> ids) {
  return Rng(derive_seed(base, ids));
}

}  // namespace anomattr
