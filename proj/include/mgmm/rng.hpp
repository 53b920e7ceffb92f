#pragma once

#include <cstddef>
#include <cstdint>

namespace mgmm {

/// splitmix64 generator. Produces identical streams on every platform,
/// unlike the std distributions, so seeded runs replay bit-exactly.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform index in [0, n); n must be positive.
  size_t index(size_t n) { return static_cast<size_t>(next_u64() % n); }

  bool chance(double p) { return uniform() < p; }

  /// Derives an independent substream keyed by `salt`.
  Rng fork(uint64_t salt) const {
    Rng r(state_ ^ (salt * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
    r.next_u64();
    return r;
  }

 private:
  uint64_t state_;
};

}  // namespace mgmm
