// language.hpp -- exact evaluators for the SAT-derived weighted languages:
// string weights, prefix masses Z(x-hat), local conditional probabilities,
// the exact trie-backed local model, chain-rule scoring, and the hardness
// separation probes.
//
// Two variants share one machinery:
//   * members_only: weight (1/3)^{|x|+1} on member strings enc(phi)·a with
//     a satisfying phi, and 0 everywhere else.
//   * full_support: the members_only weight plus epsilon·(1/9)^{|x|+1} on
//     EVERY string, so no string has zero mass.
//
// All quantities are exact rationals.  Doubles appear only in tests that
// cross-check closed forms against truncated sums.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "satlang/bits.hpp"
#include "satlang/errors.hpp"
#include "satlang/formula.hpp"
#include "satlang/rational.hpp"
#include "satlang/rng.hpp"

namespace satlang {

enum class Variant : std::uint8_t { kMembersOnly, kFullSupport };

// Which formulas count as members.  kAll admits every decodable formula;
// kCanonicalCnf3 admits only canonical 3-CNF trees (the witness network's
// domain), giving weight 0 to every other decodable string.
enum class Family : std::uint8_t { kAll, kCanonicalCnf3 };

enum class Symbol : std::uint8_t { kZero, kOne, kEnd };

// Default resource cap for prefix-mass enumeration when the prefix ends
// strictly inside a formula encoding (the exponential shape); measured in
// total encoding bits explored.
inline constexpr int kDefaultPrefixTotalCap = 20;

// Default cap on trie depth (total string length).
inline constexpr int kDefaultTrieCap = 20;

struct SatLanguage {
  Variant variant = Variant::kMembersOnly;
  Family family = Family::kAll;
  Rat epsilon = Rat(1);  // full_support only; must be > 0 there

  // When set, the language is the RESTRICTION to strings of length <=
  // length_limit: weights beyond the limit are 0 and every mass below is
  // computed exactly (no truncation flags).  When unset, prefix masses
  // that would require unbounded encoding enumeration are cut off at
  // prefix_total_cap and flagged as truncated.
  std::optional<int> length_limit;

  int assignment_cap = kDefaultEnumerationCap;
  int prefix_total_cap = kDefaultPrefixTotalCap;

  static SatLanguage members_only(Family f = Family::kAll);
  static SatLanguage full_support(const Rat& eps = Rat(1),
                                  Family f = Family::kAll);
  // Copy of this language restricted to strings of length <= n (takes the
  // minimum with any existing limit).
  SatLanguage restricted(int n) const;
};

// p-tilde(x), exactly.  Polynomial time in |x|.
Rat weight(const SatLanguage& L, const BitString& x);

// The (1/9)-tail mass over all extensions of a prefix of the given length:
// sum_{d>=0} 2^d (1/9)^{len+d+1} = (1/9)^{len+1} · 9/7.
Rat z2_closed_form(std::size_t prefix_len);

// The same sum truncated at extension depth `depth` (inclusive), summed
// term by term; the float cross-check compares it against the closed form.
Rat z2_truncated(std::size_t prefix_len, std::size_t depth);

struct PrefixMass {
  Rat z1;     // mass of member continuations (the (1/3)-scale part)
  Rat z2;     // geometric (1/9)-tail factor for this prefix, WITHOUT epsilon
  Rat total;  // z1 (+ epsilon·z2 under full_support)
  // True iff z1 required enumerating formula encodings past the resource
  // cap, so z1/total are LOWER BOUNDS rather than exact values.  Never set
  // for length-restricted languages or for prefixes whose formula part is
  // already decoded.
  bool truncated = false;
};

// Z(x-hat) = sum of weights of all strings extending x-hat (including
// x-hat itself).  Exact unless .truncated.
PrefixMass prefix_mass(const SatLanguage& L, const BitString& xhat);

// p(s | x-hat) = Z(x-hat·s)/Z(x-hat), with p($|x-hat) = weight(x-hat)/Z(x-hat).
// Throws ArgumentError when Z(x-hat) = 0 (conditional undefined) and
// CapacityError when a truncated mass would silently distort the answer.
Rat local_prob(const SatLanguage& L, const BitString& xhat, Symbol s);

// --- hardness separation probes ------------------------------------------

// Probe configuration: the approximation factor lambda is stored as its
// square, which is rational even for lambda = sqrt(2).  The constructor
// enforces k >= choose_k_sq(lambda_sq) so that 1 + 2^{k-1} > lambda^2.
struct SeparationProbe {
  Rat lambda_sq;
  int k;
  Rat epsilon;  // must match the language's epsilon under full_support

  SeparationProbe(const Rat& lambda_sq_, int k_, const Rat& eps = Rat(1));
  static SeparationProbe from_lambda(const Rat& lambda, int k_,
                                     const Rat& eps = Rat(1));
};

struct SeparationGap {
  // p(0 | enc(phi')) where phi' = add_one_and_blow_up(phi, k), exactly.
  Rat p0;
  // members_only: the satisfiable-case ceiling 1/(1+2^{k-1}); p0 is either
  //   exactly 1 (unsatisfiable) or <= bound (satisfiable).
  // full_support: the guaranteed ratio (1+2^{k-1})/(1+2*epsilon/7) between
  //   the unsatisfiable-case and satisfiable-case values of p0.
  Rat bound;
  // What p0 would be if phi were unsatisfiable, from the closed form alone
  // (no satisfiability query): 1 under members_only; under full_support a
  // function of |enc(phi')| and j+k only.
  Rat counterfactual_unsat_p0;
  // The probe's verdict, computed from exact rationals only:
  //   members_only:  lambda^2 · p0 < 1       (Thm-style threshold test)
  //   full_support:  p0 · bound <= counterfactual_unsat_p0
  // Both rules provably classify every formula correctly.
  bool decided_sat;
};

// Exact separation probe on phi.  Requires an unrestricted language;
// under full_support, probe.epsilon must equal L.epsilon.
SeparationGap separation_gap(const SatLanguage& L, const Formula& phi,
                             const SeparationProbe& probe);

// --- exact local models ----------------------------------------------------

// A locally-normalized model over {0,1,$}: q(s | x-hat) for prefixes up to
// max_len.  Implementations are exact-rational or float-backed; this
// project's exact ones guarantee q(0)+q(1)+q($) = 1 identically.
class LocalModel {
 public:
  virtual ~LocalModel() = default;
  virtual int max_len() const = 0;
  // Throws ArgumentError if the prefix is outside the model's support or
  // longer than max_len.
  virtual Rat prob(const BitString& xhat, Symbol s) const = 0;
};

// prod_t q(x_t | x_{<t}) · q($ | x).  Returns 0 (not an error) as soon as
// a prefix leaves the model's support; throws only if |x| > max_len.
Rat chain_rule_score(const LocalModel& q, const BitString& x);

// The uniform local model q(0)=q(1)=q($)=1/3 at every prefix; chain-rule
// scores are exactly (1/3)^{|x|+1}, the members' weight scale.
class UniformLocalModel final : public LocalModel {
 public:
  explicit UniformLocalModel(int max_len) : max_len_(max_len) {}
  int max_len() const override { return max_len_; }
  Rat prob(const BitString& xhat, Symbol s) const override;

 private:
  int max_len_;
};

// Exact trie-backed local model for the restriction of L to strings of
// length <= n: member prefixes are enumerated once and stored sparsely;
// the (1/9)-tail of full_support is folded in by closed form, so the node
// count stays proportional to the member prefix count, not 2^n.
// Stored conditionals agree exactly with local_prob over L.restricted(n).
class TrieModel final : public LocalModel {
 public:
  // Throws CapacityError if n > trie_cap.
  TrieModel(const SatLanguage& L, int n, int trie_cap = kDefaultTrieCap);

  int max_len() const override { return n_; }
  Rat prob(const BitString& xhat, Symbol s) const override;

  // Z_n(x-hat) over the restricted language; prob = ratio of these.
  Rat mass(const BitString& xhat) const;
  Rat total_mass() const { return mass({}); }
  bool reachable(const BitString& xhat) const;

  // Number of stored member-prefix nodes (unreachable prefixes are absent).
  std::size_t node_count() const { return z1_.size(); }

  // Ancestral sampling with exact rational threshold comparisons; the
  // returned string always has positive weight under the restriction.
  // Throws ArgumentError if the model's total mass is zero.
  BitString sample(Rng& rng) const;

 private:
  SatLanguage lang_;  // restricted to n_
  int n_;
  std::map<BitString, Rat> z1_;             // member-continuation mass
  std::map<BitString, Rat> member_weight_;  // exact members' (1/3)-weights

  Rat z1_at(const BitString& xhat) const;
};

}  // namespace satlang
