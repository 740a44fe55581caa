#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "pulseforge/common.hpp"

namespace pulseforge::util {

// splitmix64; used to mix (seed, index, stream) into independent sub-seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t stream = 0) {
  return mix64(mix64(master) ^ mix64(index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL) ^
               mix64(stream + 0x13198a2e03707344ULL));
}

// Deterministic RNG. std::mt19937_64 raw draws are portable; the
// distributions in <random> are not, so uniform/normal are written out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform in [a, b)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free would bias for huge n; n here is always small.
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  // standard normal via Box-Muller (spare discarded for statelessness)
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace pulseforge::util
