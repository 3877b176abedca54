#pragma once

#include <cmath>
#include <cstdint>

namespace transona {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (counter + 1));
  return splitmix64(s);
}

// Small deterministic generator (xorshift-seeded splitmix stream). Output is
// platform-independent, unlike std::uniform_* distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_); }

  // uniform in [0, bound)
  std::uint64_t below(std::uint64_t bound) {
    // multiply-shift range reduction
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double prob) { return uniform() < prob; }

  double normal() {
    // Box-Muller; one value per call keeps the stream simple
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace transona
