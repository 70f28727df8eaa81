#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

namespace gos {

/// Seeded generator with every distribution hand-rolled on top of the raw
/// 64-bit stream, so replays are exact across standard libraries. The
/// algorithm name recorded in serialized documents is "splitmix64-xoshiro256pp".
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    // splitmix64 seeding of the xoshiro256++ state
    uint64_t x = seed;
    for (int i = 0; i < 4; ++i) s_[i] = splitmix(x);
  }

  static constexpr const char* kAlgorithm = "splitmix64-xoshiro256pp";

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  /// Box-Muller; consumes exactly two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = u01(), u2 = u01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> cgauss() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  /// Deterministic child stream; used to give independent substreams to
  /// stages, nets, and trials without coupling their draw counts.
  Rng derive(const std::string& tag) const {
    uint64_t h = 1469598103934665603ull;  // FNV-1a over (state0, tag)
    auto mix = [&h](uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    mix(s_[0]);
    mix(s_[3]);
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return Rng(h);
  }

 private:
  static uint64_t splitmix(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gos
