#pragma once

#include <cmath>
#include <cstdint>

namespace ttslat {

// Counter-based generator. A 64-bit stream key is derived from
// (seed, trial, branch, stream) and each draw finalizes key + i*golden with
// the SplitMix64 mixer, so a stream's i-th draw is a pure function of its key
// and index. Streams can therefore be evaluated in any order, on any number
// of workers, and replay bit-identically.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t trial = 0, uint64_t branch = 0,
                      uint64_t stream = 0)
      : key_(derive_key(seed, trial, branch, stream)) {}

  static uint64_t derive_key(uint64_t seed, uint64_t trial, uint64_t branch,
                             uint64_t stream) {
    uint64_t k = mix(seed + kGolden);
    k = mix(k ^ (trial + kGolden));
    k = mix(k ^ rotl(branch + kGolden, 17));
    k = mix(k ^ rotl(stream + kGolden, 31));
    return k;
  }

  // i-th draw of an externally managed stream; used in hot loops where the
  // index is a natural counter (e.g. the cycle number).
  static uint64_t at(uint64_t key, uint64_t index) {
    return mix(key + kGolden * (index + 1));
  }

  static double unit_at(uint64_t key, uint64_t index) {
    return static_cast<double>(at(key, index) >> 11) * 0x1.0p-53;
  }

  uint64_t next_u64() { return at(key_, counter_++); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_unit() < p; }

  double uniform(double lo, double hi) { return lo + next_unit() * (hi - lo); }

  double gaussian() {
    // Box-Muller; u1 clamped away from 0.
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Marsaglia-Tsang; shape < 1 boosted through the Gamma(shape+1) identity.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = next_unit();
      if (u < 1e-300) u = 1e-300;
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = gaussian();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = next_unit();
      if (u < 1e-300) u = 1e-300;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return d * v;
      }
    }
  }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    double s = x + y;
    return s > 0.0 ? x / s : 0.5;
  }

 private:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static uint64_t mix(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace ttslat
