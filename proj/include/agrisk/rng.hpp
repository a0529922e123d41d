#pragma once

#include <array>
#include <cstdint>

namespace agrisk {

// SplitMix64 (Steele, Lea, Flood). Used to expand seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;

 private:
  std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman, Vigna). Output is identical on every platform
// for a given seed; the standard library engines and distributions are not
// used anywhere in data generation.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;
  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept;
  // Uniform integer in [0, n), n > 0 (multiply-shift; bias < n / 2^64).
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::array<std::uint64_t, 4> s_;
};

// Independent stream seed for a named purpose, derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

}  // namespace agrisk
