#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace emoclass::detail {

// std::mt19937_64 is fully specified by the standard, but the distributions
// are not. These helpers derive doubles and bounded integers from raw engine
// output so seeded runs are reproducible across standard libraries.
using Engine = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& engine, double lo, double hi) {
  return lo + (hi - lo) * uniform01(engine);
}

/// Uniform integer in [0, bound) by rejection sampling, bound > 0.
inline std::uint64_t bounded(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw = engine();
  while (draw >= limit) draw = engine();
  return draw % bound;
}

template <typename T>
void shuffle(std::span<T> values, Engine& engine) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(engine, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace emoclass::detail
