#ifndef TWPARSE_RNG_H
#define TWPARSE_RNG_H

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace twparse {

// Seeded RNG with hand-rolled distributions so that streams are identical
// across standard libraries. Every training routine takes one of these;
// identical seeds give bit-identical runs.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed), base_seed_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n).
  size_t below(size_t n) {
    return n ? static_cast<size_t>(uniform01() * static_cast<double>(n)) : 0;
  }

  // Box-Muller; one value per call keeps the stream layout simple.
  double normal(double mean, double stddev) {
    double u1 = uniform01(), u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    return mean + stddev * z;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Child stream derived from this seed and a tag; used for per-sentence
  // sampling that must not depend on iteration order or thread count.
  Rng fork(uint64_t tag) const {
    return Rng(seed_mix(base_seed_, tag));
  }

  static uint64_t seed_mix(uint64_t a, uint64_t b) {
    uint64_t x = a + 0x9e3779b97f4a7c15ull * (b + 1);
    x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27; x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

 private:
  std::mt19937_64 engine_;
  uint64_t base_seed_;
};

}  // namespace twparse

#endif
