#pragma once

#include <cstdint>
#include <random>
#include <string_view>

// Portable, seed-reproducible random helpers. Distribution code is spelled out
// here instead of using <random> distributions because those are allowed to
// differ between standard library implementations.
namespace pvrag::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a over the bytes of `s`.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Maps the top 53 bits of a 64-bit word to [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateless counter-based stream: value(i) depends only on (seed, key, i).
class CounterStream {
 public:
  constexpr CounterStream(std::uint64_t seed, std::uint64_t key) noexcept
      : base_(mix64(mix64(seed) ^ key)) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(base_ ^ mix64(counter + 0x632BE59BD9B4E019ull));
  }
  constexpr double uniform(std::uint64_t counter) const noexcept { return to_unit(bits(counter)); }

 private:
  std::uint64_t base_;
};

using Engine = std::mt19937_64;

inline double uniform01(Engine& e) { return to_unit(e()); }

/// Unbiased integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_below(Engine& e, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t x;
  do {
    x = e();
  } while (x >= limit);
  return x % n;
}

/// Standard normal via Box-Muller (one draw per call).
double standard_normal(Engine& e);

}  // namespace pvrag::rng
