#pragma once

#include <cmath>
#include <cstdint>

namespace grasslag {

// Deterministic splitmix64 stream. Substreams are keyed by (seed, stream) so
// results never depend on thread scheduling or thread count.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream) {
    state_ = mix(seed + 0x9e3779b97f4a7c15ull);
    state_ ^= mix(stream * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull);
    if (state_ == 0) state_ = 0x2545f4914f6cdd1dull;
    have_gauss_ = false;
    gauss_cache_ = 0.0;
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller (pair cached)
  double gauss() {
    if (have_gauss_) {
      have_gauss_ = false;
      return gauss_cache_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    gauss_cache_ = r * std::sin(a);
    have_gauss_ = true;
    return r * std::cos(a);
  }

  // integer in [lo, hi] inclusive
  long long integer(long long lo, long long hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(next_u64() % span);
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t state_;
  bool have_gauss_;
  double gauss_cache_;
};

}  // namespace grasslag
