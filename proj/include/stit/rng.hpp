// Seeded random streams with portable, engine-stable sampling primitives.
//
// All distributions are built by hand on top of std::mt19937_64 (whose output
// sequence is pinned by the standard), so a fixed master seed reproduces runs
// bit for bit across platforms and compilers.  Replication r of a batch uses
// an independent stream derived from hash(master_seed, r).
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "stit/vec.hpp"

namespace stit {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace detail

inline std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t replication) {
  return detail::splitmix64(detail::splitmix64(master_seed) ^ detail::splitmix64(replication + 1));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  static RandomStream for_replication(std::uint64_t master_seed, std::uint64_t replication) {
    return RandomStream(replication_seed(master_seed, replication));
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Unbiased integer in [0,n).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  double exponential(double rate) {
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform()) / rate;
  }

  // Exact Poisson sampling; multiplication method in chunks keeps the
  // product away from underflow for large means.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be nonnegative");
    std::uint64_t total = 0;
    while (mean > 500.0) {
      total += poisson_knuth(500.0);
      mean -= 500.0;
    }
    return total + poisson_knuth(mean);
  }

  // Uniform direction on the unit sphere S^{D-1}.
  template <int D>
  Vec<D> direction() {
    if constexpr (D == 2) {
      const double a = 2.0 * pi_ * uniform();
      return Vec2{{std::cos(a), std::sin(a)}};
    } else {
      // Marsaglia (1972): rejection from the unit disk.
      for (;;) {
        const double a = 2.0 * uniform() - 1.0;
        const double b = 2.0 * uniform() - 1.0;
        const double s = a * a + b * b;
        if (s >= 1.0 || s == 0.0) continue;
        const double f = 2.0 * std::sqrt(1.0 - s);
        return Vec3{{a * f, b * f, 1.0 - 2.0 * s}};
      }
    }
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::uint64_t poisson_knuth(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    for (;;) {
      p *= uniform();
      if (p <= limit) return k;
      ++k;
    }
  }

  static constexpr double pi_ = 3.14159265358979323846;
  std::mt19937_64 eng_;
};

}  // namespace stit
