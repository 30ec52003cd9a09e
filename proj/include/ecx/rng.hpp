#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace ecx {

// SplitMix64 step; used only to derive stream keys.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// PCG32 engine with substreams derived from a (seed, path...) key.
//
// Every draw site owns a stream keyed by seed plus a role path (for example
// {kSweep, alpha_index, replicate, kEndowment}), so parallel tasks never share
// state and results are independent of scheduling order. All floating-point
// deviates are built from raw bits here rather than <random> distributions,
// which keeps output byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}

  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t x = seed;
    splitmix64(x);
    for (std::uint64_t w : path) {
      x ^= 0x9e3779b97f4a7c15ULL * (w + 1);
      splitmix64(x);
    }
    state_ = splitmix64(x);
    inc_ = splitmix64(x) | 1ULL;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  // 53-bit uniform in [0, 1).
  double uniform01() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller, cosine branch; consumes exactly two uniforms per draw.
  double normal() {
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
};

// Stream roles used in Rng derivation paths.
namespace stream {
inline constexpr std::uint64_t kEndowment = 1;
inline constexpr std::uint64_t kRequirement = 2;
inline constexpr std::uint64_t kSweep = 3;
inline constexpr std::uint64_t kPreference = 4;
inline constexpr std::uint64_t kLabor = 5;
inline constexpr std::uint64_t kPriceInit = 6;
inline constexpr std::uint64_t kScenario = 7;
inline constexpr std::uint64_t kRetry = 99;
}  // namespace stream

}  // namespace ecx
