// dimacs.hpp -- 3-CNF clause lists, the modified-DIMACS text codec, and the
// bridge to expression-tree formulas.
//
// Text format (one formula per line): literals are space-separated variable
// indices, a negated literal is written with a separate "-" token before the
// index ("- 5 1 1"), and clauses are joined by " # ".  A clause carries one
// to three literals; generated clauses always carry exactly three.

#pragma once

#include <string>
#include <vector>

#include "satlang/bits.hpp"
#include "satlang/errors.hpp"
#include "satlang/formula.hpp"

namespace satlang {

// Literals use the DIMACS sign convention: +i is A_i, -i is NOT A_i.
struct Cnf3 {
  int var_count = 0;                      // highest index mentioned
  std::vector<std::vector<int>> clauses;  // 1..3 literals each

  bool operator==(const Cnf3& other) const = default;
};

// Parsing strictness for duplicate variables inside one clause.  Strict mode
// rejects any clause mentioning a variable twice.  Tolerant mode drops
// repeated identical literals and keeps opposite-polarity pairs (the clause
// is then tautological), which is what generator-style corpora need.
enum class DimacsMode { kStrict, kTolerant };

Cnf3 dimacs_decode(const std::string& text, DimacsMode mode = DimacsMode::kStrict);
std::string dimacs_encode(const Cnf3& f);

// Conjunction of disjunctions, right-folded in clause/literal order; zero
// clauses become the constant-true formula.
Formula cnf3_to_formula(const Cnf3& f);

// Recognizes exactly the formulas cnf3_to_formula produces from clauses with
// three distinct variables (the clause-universe shape the witness network
// tracks): a right-fold AND chain of clauses, each clause a right-fold OR of
// three literals over distinct variables.  The constant-true body counts as
// zero clauses.  Returns false for every other tree shape, including the
// one- and two-literal clauses that tolerant parsing can produce.
bool formula_to_cnf3(const Formula& f, Cnf3* out);

// Satisfaction helper on the clause form (semantics match cnf3_to_formula +
// evaluate, but without building a tree).
bool cnf3_evaluate(const Cnf3& f, const BitString& a);

}  // namespace satlang
