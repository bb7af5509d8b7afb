#pragma once

// xoshiro256** seeded through SplitMix64. Distributions are derived from
// raw 64-bit words here rather than through <random>, whose distribution
// algorithms differ between standard libraries; streams are therefore
// reproducible across platforms.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "vorcvp/scalar.hpp"

namespace vorcvp {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  static constexpr const char* kName = "xoshiro256**/splitmix64";

  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Independent stream `index` of the generator family identified by `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t sm = index ^ 0x5851f42d4c957f2dULL;
    const std::uint64_t salt = splitmix64(sm);
    sm = seed;
    return Rng(splitmix64(sm) ^ salt);
  }

  Rng split(std::uint64_t index) { return stream(next(), index); }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // (0, 1]
  double uniform_open01() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t below(std::uint64_t bound) {
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % bound;
  }

  double normal() {
    const double u = uniform_open01();
    const double v = uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  // Uniform integer in [0, 2^bits), most significant word first.
  Integer bits(unsigned count) {
    Integer r = 0;
    unsigned left = count;
    while (left > 0) {
      const unsigned take = left >= 64 ? 64 : left;
      std::uint64_t w = next();
      if (take < 64) w >>= (64 - take);
      Integer word;
      mpz_set_ui(word.get_mpz_t(), static_cast<unsigned long>(w));
      r = (r << take) + word;
      left -= take;
    }
    return r;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace vorcvp
