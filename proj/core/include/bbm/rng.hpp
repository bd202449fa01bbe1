#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace bbm {

// Splittable SplitMix64 stream. A stream is identified by a 64-bit state;
// sub-streams are derived by hashing (seed, key...) paths or by split(), so
// parallel consumers never share state and results do not depend on
// scheduling. All distributions are generated from explicit uniform bits,
// which keeps sequences bit-reproducible across platforms and thread counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  // Derives an independent stream from a seed and a key path, e.g.
  // (seed, atom_index, replicate).
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix(seed + 0x9E3779B97F4A7C15ull);
    for (std::uint64_t k : path) {
      s = mix(s ^ mix(k + 0xD1B54A32D192ED03ull));
    }
    return Rng(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next_exponential() { return -std::log(next_unit_open()); }

  // Box-Muller, one variate per pair of uniforms (no carry-over state).
  double next_gaussian() {
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Poisson count with arbitrary (possibly astronomically large) mean.
  // Returned as double: counts above 2^53 are only meaningful as magnitudes.
  double next_poisson(double mean);

  // Child stream derived from the current state; consumes one draw.
  Rng split() { return Rng(mix(next_u64() ^ 0xA0761D6478BD642Full)); }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace bbm
