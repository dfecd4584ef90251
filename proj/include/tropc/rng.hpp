#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace tropc {

/// Deterministic 64-bit generator (splitmix64). We roll our own instead of
/// using <random> distributions because the standard does not pin their
/// output across library implementations, and sampled artifacts must be
/// byte-identical for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  /// Uniform integer in [0, n). n must be small; modulo bias is irrelevant
  /// at the scales used here.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  /// Standard normal via Box-Muller (fully deterministic).
  double normal() {
    double u1 = u01();
    double u2 = u01();
    while (u1 <= 0.0) u1 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Uniform direction on the unit sphere of dimension n.
  std::vector<double> unit_vector(std::size_t n) {
    std::vector<double> v(n);
    while (true) {
      double s = 0.0;
      for (auto& x : v) {
        x = normal();
        s += x * x;
      }
      if (s > 1e-24) {
        const double inv = 1.0 / std::sqrt(s);
        for (auto& x : v) x *= inv;
        return v;
      }
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace tropc
