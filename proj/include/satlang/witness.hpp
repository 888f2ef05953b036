// witness.hpp -- the compact recurrent witness network: a fixed-length
// sequence acceptor whose evaluation equals the canonical-3-CNF weighted
// language exactly on every string of its length.
//
// The network follows the classic constructive recipe: one ramp unit per
// possible 3-literal clause over distinct variables (8 * C(j,3) of them),
// set when its clause is parsed during the encoding phase and cleared when
// a satisfying literal arrives during the assignment phase, plus a small
// finite-state controller (realized with further ramp units at constant
// fan-in) that scans the self-delimiting encoding.  Each input symbol
// triggers one affine-plus-ramp update whose weights are derived from the
// input length n alone; the implementation computes those structured
// updates sparsely instead of materializing the (huge, fixed-pattern)
// matrices.  All arithmetic is exact rational, every clause unit is
// exactly 0 or 1 at every step, and the only stored parameter is n, so a
// serialized network costs O(log n) bits.
//
// The scanner is written independently of the dec() decoder on purpose:
// the exhaustive equivalence tests then cross-validate two unrelated
// implementations of the same language.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "satlang/bits.hpp"
#include "satlang/errors.hpp"
#include "satlang/rational.hpp"

namespace satlang {

// A 3-literal clause over distinct variables, kept sorted: v1 < v2 < v3,
// each 1-based, with per-literal negation flags.
struct LitClause {
  int v1 = 0, v2 = 0, v3 = 0;
  bool neg1 = false, neg2 = false, neg3 = false;
  bool operator==(const LitClause&) const = default;
};

// Canonical enumeration of every 3-literal clause over distinct variables
// in 1..j: triples in lexicographic order, signs in the order
// neg1*4 + neg2*2 + neg3.  Index <-> clause is a bijection.
class ClauseUniverse {
 public:
  explicit ClauseUniverse(int j);

  int var_count() const { return j_; }
  std::size_t size() const { return triples_.size() * 8; }
  LitClause clause(std::size_t index) const;
  // Accepts the three (var, negated) literals in any order; sorts them.
  // Throws ArgumentError on duplicate variables or out-of-range indices.
  std::size_t index_of(int va, bool na, int vb, bool nb, int vc,
                       bool nc) const;

 private:
  int j_;
  std::vector<std::array<int, 3>> triples_;        // sorted triples, lex order
  std::map<std::array<int, 3>, std::size_t> rank_;  // triple -> rank
};

// Default cap on the decoded variable count the witness allocates clause
// units for.  Inputs that decode to more variables while still being short
// enough to be members (a member of length n has at most n/2 variables,
// since its encoding is at least as long as its roster) are beyond the
// network's capacity and make evaluate() throw; with this cap that can only
// happen for n >= 26, so evaluation is total on every length up to
// 2 * cap + 1.
inline constexpr int kDefaultWitnessVarCap = 12;

// Observer view passed after each consumed symbol: the live clause units
// (absent index = exactly 0) and the sticky failure unit.
struct WitnessTrace {
  const std::map<std::size_t, Rat>& clause_units;
  const Rat& fail;
  std::size_t step;
};

class WitnessRnn {
 public:
  // Throws ArgumentError if n < 0 or var_cap < 0.
  explicit WitnessRnn(int n, int var_cap = kDefaultWitnessVarCap);

  int n() const { return n_; }
  int var_cap() const { return var_cap_; }
  const ClauseUniverse& universe() const { return universe_; }

  // Exact network output on x; requires |x| = n (ArgumentError otherwise).
  // Throws CapacityError if x decodes to more than var_cap variables while
  // remaining a membership candidate.  Nonzero outputs all equal
  // (1/3)^{n+1}.
  Rat evaluate(const BitString& x) const;
  // Same, invoking the observer after every consumed symbol (for the
  // digitality property tests).
  Rat evaluate(const BitString& x,
               const std::function<void(const WitnessTrace&)>& observe) const;

  // The parameter description: a varint of n, O(log n) bits.
  std::vector<std::uint8_t> serialize() const;
  static WitnessRnn deserialize(const std::vector<std::uint8_t>& bytes,
                                int var_cap = kDefaultWitnessVarCap);

 private:
  int n_;
  int var_cap_;
  ClauseUniverse universe_;
};

// Spec-level aliases.
inline WitnessRnn build_witness(int n, int var_cap = kDefaultWitnessVarCap) {
  return WitnessRnn(n, var_cap);
}
inline Rat eval_witness(const WitnessRnn& r, const BitString& x) {
  return r.evaluate(x);
}

}  // namespace satlang
