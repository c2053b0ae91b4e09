#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace benchpred {

/// mt19937_64 plus hand-rolled distributions. The std:: distribution objects
/// are implementation-defined, so rolling our own keeps every draw identical
/// across standard libraries and makes reports byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) via rejection sampling; bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = bits();
    } while (x >= limit);
    return x % bound;
  }

  int index(int bound) { return static_cast<int>(below(static_cast<std::uint64_t>(bound))); }

  /// Standard normal via Box-Muller (no cached spare; one pair per call keeps
  /// the draw sequence independent of call interleaving).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  /// k distinct indices from [0, n), in draw order.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const int j = i + index(n - i);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
      out.push_back(pool[static_cast<std::size_t>(i)]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

/// FNV-1a over a byte stream; used to derive per-cell seeds from
/// (base seed, benchmark name, trial). Stable across platforms.
class SeedHasher {
 public:
  SeedHasher& mix(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      byte(static_cast<unsigned char>(v >> (8 * i)));
    }
    return *this;
  }

  SeedHasher& mix(std::string_view s) {
    for (const char c : s) byte(static_cast<unsigned char>(c));
    byte(0xff);  // terminator so ("ab","c") != ("a","bc")
    return *this;
  }

  std::uint64_t value() const { return state_; }

 private:
  void byte(unsigned char b) {
    state_ ^= b;
    state_ *= 0x100000001b3ull;
  }
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view name,
                                 std::uint64_t index) {
  return SeedHasher().mix(base).mix(name).mix(index).value();
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view name) {
  return SeedHasher().mix(base).mix(name).value();
}

}  // namespace benchpred
