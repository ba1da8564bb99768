#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace gps::rng {

// splitmix64 finalizer
constexpr std::uint64_t mix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Counter-based stream: a Key addresses one leaf of a (seed, word, word, ...)
// derivation tree, so any single draw is computable in isolation and the
// result never depends on evaluation order or thread count.
struct Key {
  std::uint64_t state = 0;

  [[nodiscard]] constexpr Key with(std::uint64_t word) const noexcept {
    return Key{mix(state ^ word)};
  }
  [[nodiscard]] Key with_double(double x) const noexcept {
    return with(std::bit_cast<std::uint64_t>(x));
  }
};

constexpr Key master(std::uint64_t seed) noexcept {
  return Key{mix(seed ^ 0x6a09e667f3bcc908ull)};
}

// stream tags separating independent uses of one seed
inline constexpr std::uint64_t stream_init = 0xA1;
inline constexpr std::uint64_t stream_brownian = 0xA2;
inline constexpr std::uint64_t stream_xi = 0xA3;
inline constexpr std::uint64_t stream_replication = 0xA4;
inline constexpr std::uint64_t stream_picard = 0xA5;
inline constexpr std::uint64_t stream_pairs = 0xA6;

// uniform in the open interval (0,1)
inline double uniform01(Key k, std::uint64_t salt = 0) noexcept {
  const std::uint64_t r = mix(k.state ^ (0xd6e8feb86659fd93ull * (salt + 1)));
  return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
}

// standard normal via Box-Muller; one value per key
inline double normal(Key k) noexcept {
  const double u1 = uniform01(k, 1);
  const double u2 = uniform01(k, 2);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.28318530717958647692528676655900577 * u2);
}

}  // namespace gps::rng
