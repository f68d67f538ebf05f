#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace ssr {

/// SplitMix64 output function applied to a single word.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// SplitMix64 engine (Steele, Lea & Flood; Vigna's fixed-increment version).
/// Used for seeding larger-state generators and for stream derivation.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

 private:
  std::uint64_t state_;
};

/// xoshiro256++ (Blackman & Vigna). State is seeded from SplitMix64 so any
/// 64-bit value is a valid seed.
class Xoshiro256PlusPlus {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256PlusPlus(std::uint64_t seed) : state_{} {
    SplitMix64 mix(seed);
    for (auto& word : state_) word = mix();
  }

  constexpr result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

/// Folds a key tuple into one stream seed. Distinct tuples yield independent
/// streams, which makes per-replication substreams reproducible regardless of
/// execution order or thread count.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ull;  // pi fractional bits
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits of one generator word.
template <class Generator>
double uniform_unit(Generator& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1]; safe to pass through -log().
template <class Generator>
double uniform_positive(Generator& gen) {
  return static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
}

/// Exponential(rate) draw by inverse CDF.
template <class Generator>
double exponential_draw(Generator& gen, double rate) {
  return -std::log(uniform_positive(gen)) / rate;
}

}  // namespace ssr
