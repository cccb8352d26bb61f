#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace exknet {

// All randomness goes through mt19937_64 plus the explicit transforms below.
// std::uniform_real_distribution and friends are implementation-defined, so
// they would break the bit-reproducibility contract across standard libraries.

// Uniform in [0, 1) with 53 random mantissa bits.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform in [lo, hi).
inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Box-Muller standard normal; draws two uniforms per pair of outputs.
class GaussianSampler {
 public:
  double operator()(std::mt19937_64& g) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(g);
    double u2 = uniform01(g);
    // Avoid log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  void reset() { has_spare_ = false; }

 private:
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64: cheap, well-mixed combiner for deriving sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

// FNV-1a for seeding from string identifiers (utterance ids, system labels).
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace exknet
