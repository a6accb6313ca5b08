#pragma once

#include <cstdint>

namespace weatherforge {

// SplitMix64 (Steele, Lea & Flood 2014). State advances by the golden-gamma
// constant and the output is a finalizer mix of the state, so draw k is a
// pure function of (seed, k): the generator is counter-based and streams
// derived from different seeds can be evaluated in any order.
//
// Algorithm, per draw:
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 mantissa bits. Bit-reproducible on any platform;
  // std::uniform_real_distribution is implementation-defined and is not used
  // anywhere in this library.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // True with probability p.
  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return n == 0 ? 0 : next_u64() % n;
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Derives an independent stream seed from (master, a[, b]) with the SplitMix64
// finalizer. Used for per-sample and per-layer streams so parallel generation
// is order-independent: seed(master, sample, layer) never depends on how many
// draws other streams have consumed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) {
  return detail::mix64(detail::mix64(master + 0x9E3779B97F4A7C15ULL) ^ a);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b) {
  return detail::mix64(derive_seed(master, a) ^
                       (b + 0x9E3779B97F4A7C15ULL));
}

}  // namespace weatherforge
