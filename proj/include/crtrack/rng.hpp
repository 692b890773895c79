#pragma once

#include <cmath>
#include <cstdint>

namespace crtrack::rng {

// SplitMix64 mix function. Used counter-based: value_at(seed, index) streams
// are order-free, so parallel consumers stay deterministic.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a) {
  return splitmix64(seed ^ splitmix64(a + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(mix(seed, a) ^ splitmix64(b + 0x3c6ef372fe94f82aULL));
}

// Uniform double in [0, 1).
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform_at(std::uint64_t seed, std::uint64_t index) {
  return to_unit(mix(seed, index));
}

// Standard normal via Box-Muller on two hashed uniforms; u1 is kept away
// from zero so the log stays finite.
inline double normal_at(std::uint64_t seed, std::uint64_t index) {
  const double u1 =
      (static_cast<double>(mix(seed, index, 0) >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = to_unit(mix(seed, index, 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

// Sequential helper on top of the counter-based core.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : seed_(seed) {}

  double uniform() { return uniform_at(seed_, counter_++); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() { return normal_at(seed_, counter_++); }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

  // Knuth's method; fine for the small rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace crtrack::rng
