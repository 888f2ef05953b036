// formula.hpp -- boolean formulas over variables A1..Aj, their
// satisfaction/counting oracles, the AddOne / AddOneAndBlowUp
// transformations, and the prefix-free binary codec.
//
// A Formula is a variable count j >= 0 plus an expression tree over
// {AND, OR, NOT, Var(i)} with 1 <= i <= j.  The empty body (an empty
// conjunction, i.e. the constant true) is permitted and is the only way
// "true" appears: it is never an inner node.  Well-formed formulas mention
// every index in 1..j at least once; shift() outputs are exempt (they leave
// A1 unused and are only ever consumed by add_one / add_one_and_blow_up).
// Use mentions_all_vars() to test the stronger property where it matters
// (language membership).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satlang/bits.hpp"
#include "satlang/errors.hpp"
#include "satlang/rational.hpp"
#include "satlang/rng.hpp"

namespace satlang {

class Formula;
struct DecodeResult;
struct DecodeError;

enum class NodeKind : std::uint8_t { And, Or, Not, Var };

struct ExprNode {
  NodeKind kind;
  int var = 0;     // NodeKind::Var only; 1-based index
  int left = -1;   // And/Or: left child; Not: child
  int right = -1;  // And/Or: right child
};

// An immutable expression-tree fragment.  root == -1 denotes the constant
// true (empty conjunction).  Nodes live in a private arena; composing
// fragments copies arenas, which is fine at desk scale.
class Expr {
 public:
  Expr() = default;  // constant true

  static Expr truth() { return Expr(); }
  static Expr var(int i);
  static Expr neg(const Expr& e);
  static Expr conj(const Expr& a, const Expr& b);  // true is an identity
  static Expr disj(const Expr& a, const Expr& b);
  // Right-fold of a list: conj_all({a,b,c}) = a AND (b AND c); empty list
  // is the constant true.
  static Expr conj_all(const std::vector<Expr>& parts);
  static Expr disj_all(const std::vector<Expr>& parts);

  bool is_true() const { return root_ < 0; }
  int root() const { return root_; }
  const std::vector<ExprNode>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  int max_var() const;
  bool operator==(const Expr& other) const;

 private:
  friend class Formula;
  friend Formula shift(const Formula&);
  friend std::optional<DecodeResult> dec(const BitString&, DecodeError*);

  std::vector<ExprNode> nodes_;
  int root_ = -1;

  int copy_subtree(const Expr& src, int node);
  // Adopts a prebuilt arena; every child index must precede its parent and
  // `root` must be the last node.  Internal: used by shift() and dec().
  static Expr from_arena(std::vector<ExprNode> nodes, int root);
};

class Formula {
 public:
  // Throws ArgumentError if var_count < 0 or the body mentions an index
  // outside 1..var_count.
  Formula(int var_count, Expr body);

  int var_count() const { return var_count_; }
  const Expr& body() const { return body_; }

  // True iff every index in 1..var_count appears in the body.
  bool mentions_all_vars() const;

  bool operator==(const Formula& other) const {
    return var_count_ == other.var_count_ && body_ == other.body_;
  }

  // Human-readable rendering, for diagnostics only.
  std::string to_string() const;

 private:
  int var_count_;
  Expr body_;
};

// --- satisfaction & counting -------------------------------------------

// Caps every exhaustive oracle at 2^24 assignment evaluations by default.
inline constexpr int kDefaultEnumerationCap = 24;

// a[t] is the value of variable A_{t+1}; |a| must equal f.var_count().
bool evaluate(const Formula& f, const BitString& a);

// Exact #(f) by exhaustive enumeration (word-parallel, 64 assignments per
// step).  Throws CapacityError if var_count exceeds the cap.
Int count_satisfying(const Formula& f, int enumeration_cap = kDefaultEnumerationCap);

// Lexicographically smallest satisfying assignment (a1 most significant),
// or nullopt if unsatisfiable.  Same cap as count_satisfying.
std::optional<BitString> first_satisfier(const Formula& f,
                                         int enumeration_cap = kDefaultEnumerationCap);

// All satisfying assignments in lexicographic order.
std::vector<BitString> all_satisfiers(const Formula& f,
                                      int enumeration_cap = kDefaultEnumerationCap);

// Number of satisfying assignments that extend the partial assignment r
// (r fixes A1..A_{|r|} in order).  Work is 2^{j - |r|} evaluations, so the
// cap applies to j - |r| rather than j.
Int count_satisfying_extensions(const Formula& f, const BitString& r,
                                int enumeration_cap = kDefaultEnumerationCap);

// --- the paper-style transformations ------------------------------------

// Renames every A_i to A_{i+1}; result has var_count j+1 with A1 unused.
Formula shift(const Formula& f);

// phi' = (NOT A1 AND ... AND NOT A_{j+1}) OR (A1 AND shift(f)); satisfiers
// are 0^{j+1} plus {1a : a satisfies f}, so #(phi') = #(f) + 1.
Formula add_one(const Formula& f);

// Adds k variables (k >= 1): satisfiers are 0^{j+k} plus
// {1 a b : a satisfies f, b in B^{k-1}}, so #(result) = 1 + 2^{k-1} #(f).
// k = 1 coincides exactly with add_one.
Formula add_one_and_blow_up(const Formula& f, int k);

// Smallest k >= 1 with 1 + 2^{k-1} > lambda^2: the blow-up needed so that
// no single probability value can sit within factor lambda of both the
// satisfiable and unsatisfiable cases.  lambda_sq form is provided for
// irrational lambda with rational square (e.g. lambda = sqrt(2)).
int choose_k_sq(const Rat& lambda_sq);
int choose_k(const Rat& lambda);

// --- prefix-free binary codec -------------------------------------------
//
// enc(f) = gamma(j+1) ++ gamma(m+1) ++ preorder(body) ++ [roster]
// where gamma is the Elias gamma code, m is the node count of the body
// (m = 0 encodes the empty conjunction), preorder serializes nodes with
// 2-bit opcodes AND=00 OR=01 NOT=10 VAR=11 (VAR followed by gamma(i)), and
// roster is a run of exactly j '1' bits appended iff the preceding part is
// shorter than j bits.  The roster guarantees |enc(f)| >= j; gamma codes
// and the content-determined preorder make the whole code prefix-free and
// self-delimiting, so dec can report exactly how many bits it consumed.

BitString enc(const Formula& f);

struct DecodeResult {
  Formula formula;
  std::size_t consumed = 0;  // bits of input consumed
};

enum class DecodeFailure {
  kInvalid,     // input definitely cannot start any encoding
  kNeedMoreBits // input is a proper prefix of at least one potential encoding
};

struct DecodeError {
  DecodeFailure kind;
  std::size_t position;
  std::string message;
};

// Decodes a formula from the front of x.  On success the result's consumed
// field is the exact encoding length (trailing bits are the caller's
// business).  On failure, DecodeError says whether more input could ever
// help; prefix-mass enumeration relies on that distinction.
std::optional<DecodeResult> dec(const BitString& x, DecodeError* err = nullptr);

// --- random formulas (test/data support) ---------------------------------

// Deterministic random formula with var_count in [1, max_vars] and roughly
// `extra_leaves` leaves beyond the coverage minimum; mentions every index.
Formula random_formula(Rng& rng, int max_vars, int extra_leaves = 4);

}  // namespace satlang
