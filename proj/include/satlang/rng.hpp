// rng.hpp -- deterministic random-number utilities.
//
// All randomness in the project flows through std::mt19937_64 plus the
// helpers below.  We deliberately avoid std::uniform_int_distribution and
// friends: their output is implementation-defined, and the artifact
// promises byte-identical reruns.  Derived seeds (per var-count, per
// example index, per bootstrap cell) come from splitmix64 hashing so that
// parallel generation order cannot change results.

#pragma once

#include <cstdint>
#include <random>

#include "satlang/rational.hpp"

namespace satlang {

using Rng = std::mt19937_64;

// splitmix64: the standard 64-bit finalizer used to derive independent
// seeds from a master seed and a stream of indices.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(splitmix64(master ^ 0x5851f42d4c957f2dULL) +
                    splitmix64(a) * 0x2545f4914f6cdd1dULL + b);
}

// Unbiased integer in [0, n) via threshold rejection.
inline std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

inline int rand_bit(Rng& rng) { return static_cast<int>(rng() & 1u); }

// Double uniform in [0, 1) with 53 random bits (the usual construction).
inline double rand_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exact rational uniform in [0, 1): a 64-bit draw over 2^64.  Used when a
// sampling decision must be made against exact rational probabilities, so
// that no floating-point rounding can ever select a zero-mass branch.
inline Rat rand_unit_rat(Rng& rng) {
  Rat r(Int(rng()), int_pow(2, 64));
  r.canonicalize();
  return r;
}

}  // namespace satlang
