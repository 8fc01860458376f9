#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ensel {

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Derives a seed from a parent seed and a list of coordinates
/// (repetition, fold, grid cell, ...). Order matters.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> coords);

/// Seeded, single-owner random stream.
///
/// Built on std::mt19937_64 (whose output sequence is fixed by the standard).
/// The bounded-integer, uniform and normal draws are implemented here rather
/// than via <random> distributions, whose algorithms are implementation
/// defined, so a seed reproduces the same values on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  template <typename It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ensel
