// rational.hpp -- exact rational arithmetic helpers on top of GMP.
//
// Every oracle-grade quantity in this project (sequence weights, prefix
// masses, local conditional probabilities, separation ratios) is an exact
// rational; double precision is reserved for the learned models.  We use
// GMP's canonicalizing mpq_class directly and add the few helpers the
// oracles need: integer powers, powers of 1/3 and 1/9, and a log that stays
// accurate when numerator/denominator overflow double range.

#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>

namespace satlang {

using Int = mpz_class;
using Rat = mpq_class;

// base^exp for non-negative integer exponents.
inline Int int_pow(unsigned long base, unsigned long exp) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

// r^exp for non-negative integer exponents.
inline Rat rat_pow(const Rat& r, unsigned long exp) {
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), r.get_num().get_mpz_t(), exp);
  mpz_pow_ui(out.get_den_mpz_t(), r.get_den().get_mpz_t(), exp);
  out.canonicalize();
  return out;
}

// (1/3)^n and (1/9)^n, the two weight scales used by the SAT languages.
inline Rat third_pow(unsigned long n) { return Rat(1, int_pow(3, n)); }
inline Rat ninth_pow(unsigned long n) { return Rat(1, int_pow(9, n)); }

// Natural log of a positive rational, exact to double rounding even when
// the numerator/denominator do not fit in a double.  mpz_get_d_2exp gives
// m * 2^e with m in [0.5, 1), so log(z) = log(m) + e*log(2).
inline double rat_log(const Rat& r) {
  signed long ne = 0, de = 0;
  double nm = mpz_get_d_2exp(&ne, r.get_num().get_mpz_t());
  double dm = mpz_get_d_2exp(&de, r.get_den().get_mpz_t());
  return (std::log(nm) - std::log(dm)) +
         (static_cast<double>(ne) - static_cast<double>(de)) * std::log(2.0);
}

// Double conversion that survives exponent overflow by going through
// rat_log when mpq_get_d would return 0 or inf.
inline double rat_double(const Rat& r) {
  if (sgn(r) == 0) return 0.0;
  double d = r.get_d();
  if (d != 0.0 && std::isfinite(d)) return d;
  double lg = rat_log(abs(r));
  double mag = std::exp(lg);
  return sgn(r) < 0 ? -mag : mag;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace satlang
