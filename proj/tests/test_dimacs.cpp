// Tests for the modified-DIMACS codec and clause-form helpers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "satlang/dimacs.hpp"
#include "satlang/formula.hpp"

using namespace satlang;

namespace {

// A published 25-clause sample over 6 variables, reproduced verbatim.
const std::string kSampleText =
    "- 5 1 1 # 1 6 3 # - 5 5 - 4 # - 5 2 - 6 # 2 4 - 1 # - 5 3 1 # "
    "- 6 1 1 # - 2 2 - 2 # 3 - 4 1 # - 4 3 - 5 # - 6 - 5 4 # 2 3 - 3 # "
    "2 - 2 2 # 1 - 3 1 # - 6 - 4 2 # - 4 - 4 4 # 4 - 5 - 4 # 6 - 6 6 # "
    "- 2 1 5 # 5 2 - 3 # - 6 - 1 - 3 # - 6 2 - 5 # - 3 - 1 3 # 1 - 1 - 1 # "
    "- 4 - 2 3";

BitString bs(const std::string& s) { return bits_from_string(s); }

}  // namespace

TEST_CASE("simple clause decoding") {
  Cnf3 f = dimacs_decode("1 2 3");
  CHECK(f.var_count == 3);
  REQUIRE(f.clauses.size() == 1);
  CHECK(f.clauses[0] == std::vector<int>{1, 2, 3});
  CHECK(dimacs_encode(f) == "1 2 3");

  Cnf3 g = dimacs_decode("- 5 1 2 # 3 - 4 5");
  CHECK(g.var_count == 5);
  REQUIRE(g.clauses.size() == 2);
  CHECK(g.clauses[0] == std::vector<int>{-5, 1, 2});
  CHECK(g.clauses[1] == std::vector<int>{3, -4, 5});
  CHECK(dimacs_encode(g) == "- 5 1 2 # 3 - 4 5");
}

TEST_CASE("duplicate variables: strict rejects, tolerant dedups") {
  CHECK_THROWS_AS(dimacs_decode("- 5 1 1"), ParseError);
  Cnf3 f = dimacs_decode("- 5 1 1", DimacsMode::kTolerant);
  REQUIRE(f.clauses.size() == 1);
  CHECK(f.clauses[0] == std::vector<int>{-5, 1});  // identical literal dropped
  CHECK(f.var_count == 5);

  // opposite-polarity pairs survive (the clause is tautological)
  Cnf3 g = dimacs_decode("- 5 5 - 4", DimacsMode::kTolerant);
  CHECK(g.clauses[0] == std::vector<int>{-5, 5, -4});
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(dimacs_decode("1 0 2"), ParseError);
  CHECK_THROWS_AS(dimacs_decode("1 x 2"), ParseError);
  CHECK_THROWS_AS(dimacs_decode("1 2 -"), ParseError);
  CHECK_THROWS_AS(dimacs_decode("1 2 - - 3"), ParseError);
  CHECK_THROWS_AS(dimacs_decode("1 2 3 4"), ParseError);
  CHECK_THROWS_AS(dimacs_decode("1 2 3 # # 4 5 6"), ParseError);
  CHECK_THROWS_AS(dimacs_decode("1 2 3 #"), ParseError);
  try {
    dimacs_decode("1 0 2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 2);
  }
}

TEST_CASE("empty text is the zero-clause formula") {
  Cnf3 f = dimacs_decode("");
  CHECK(f.var_count == 0);
  CHECK(f.clauses.empty());
  CHECK(dimacs_encode(f) == "");
  CHECK(cnf3_to_formula(f).body().is_true());
}

TEST_CASE("published sample: parse, satisfiability, and round-trip") {
  CHECK_THROWS_AS(dimacs_decode(kSampleText), ParseError);  // riddled with dups
  Cnf3 f = dimacs_decode(kSampleText, DimacsMode::kTolerant);
  CHECK(f.var_count == 6);
  CHECK(f.clauses.size() == 25);

  Formula tree = cnf3_to_formula(f);
  CHECK(count_satisfying(tree) > 0);  // the sample is satisfiable, as billed

  // The caption's printed assignment 111101 leaves the clause
  // (!A6 | !A1 | !A3) unsatisfied -- A1, A3, A6 are all true under it.
  // Flipping the final bit fixes it; the published bit string appears to
  // carry a typo.  Record the arithmetic truth here.
  CHECK_FALSE(evaluate(tree, bs("111101")));
  CHECK(evaluate(tree, bs("111100")));
  CHECK(cnf3_evaluate(f, bs("111100")));

  // Value round-trip: encode the deduped clause list, decode it again,
  // arrive at the identical value.  Tautological clauses (a variable with
  // both polarities, e.g. "- 5 5 - 4") survive dedup, so the re-decode
  // also needs the tolerance flag; strict mode insists on three distinct
  // variables per clause.
  std::string canon = dimacs_encode(f);
  CHECK_THROWS_AS(dimacs_decode(canon), ParseError);
  Cnf3 again = dimacs_decode(canon, DimacsMode::kTolerant);
  CHECK(again == f);
  CHECK(dimacs_encode(again) == canon);
}

TEST_CASE("cnf3_to_formula matches clause-form evaluation") {
  Cnf3 f = dimacs_decode(kSampleText, DimacsMode::kTolerant);
  Formula tree = cnf3_to_formula(f);
  for (std::uint32_t id = 0; id < 64; ++id) {
    BitString a(6);
    for (int t = 0; t < 6; ++t) a[t] = (id >> (5 - t)) & 1;
    CHECK(evaluate(tree, a) == cnf3_evaluate(f, a));
  }
}

TEST_CASE("single clause converts to a disjunction") {
  Cnf3 f;
  f.var_count = 3;
  f.clauses = {{1, -2, 3}};
  Formula g = cnf3_to_formula(f);
  CHECK(count_satisfying(g) == 7);  // all but 010
  CHECK_FALSE(evaluate(g, bs("010")));
  CHECK(evaluate(g, bs("000")));
}

TEST_CASE("formula_to_cnf3 recognizes exactly the canonical shape") {
  Cnf3 f;
  f.var_count = 5;
  f.clauses = {{1, -2, 3}, {-4, 5, 1}, {2, 3, -5}};
  Formula tree = cnf3_to_formula(f);
  Cnf3 back;
  REQUIRE(formula_to_cnf3(tree, &back));
  CHECK(back == f);

  // zero clauses: canonical, empty
  Cnf3 empty;
  REQUIRE(formula_to_cnf3(Formula(0, Expr::truth()), &empty));
  CHECK(empty.clauses.empty());

  // a deduped two-literal clause is not canonical
  Cnf3 two;
  two.var_count = 5;
  two.clauses = {{-5, 1}};
  CHECK_FALSE(formula_to_cnf3(cnf3_to_formula(two), nullptr));

  // repeated variable inside a clause is not canonical
  Expr taut = Expr::disj(
      Expr::var(1), Expr::disj(Expr::neg(Expr::var(1)), Expr::var(2)));
  CHECK_FALSE(formula_to_cnf3(Formula(2, taut), nullptr));

  // non-clause shapes are not canonical
  CHECK_FALSE(formula_to_cnf3(Formula(1, Expr::var(1)), nullptr));
  Formula blown = add_one_and_blow_up(Formula(1, Expr::var(1)), 2);
  CHECK_FALSE(formula_to_cnf3(blown, nullptr));
}

TEST_CASE("round-trip on random clause lists") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    Cnf3 f;
    f.var_count = 4 + static_cast<int>(rand_below(rng, 7));
    int n_clauses = 1 + static_cast<int>(rand_below(rng, 12));
    for (int c = 0; c < n_clauses; ++c) {
      std::vector<int> vars;
      while (static_cast<int>(vars.size()) < 3) {
        int v = 1 + static_cast<int>(rand_below(rng, f.var_count));
        bool seen = false;
        for (int u : vars) seen = seen || u == v;
        if (!seen) vars.push_back(v);
      }
      std::vector<int> clause;
      for (int v : vars) clause.push_back(rand_bit(rng) ? v : -v);
      f.clauses.push_back(clause);
    }
    // ensure var_count matches the max actually used
    int used = 0;
    for (const auto& c : f.clauses)
      for (int lit : c) used = std::max(used, std::abs(lit));
    f.var_count = used;

    std::string text = dimacs_encode(f);
    CHECK(dimacs_decode(text) == f);

    Formula tree = cnf3_to_formula(f);
    Cnf3 back;
    REQUIRE(formula_to_cnf3(tree, &back));
    CHECK(back == f);
    // counting agreement between tree evaluation and clause evaluation
    Int n = count_satisfying(tree);
    Int m = 0;
    for (std::uint32_t id = 0; id < (1u << f.var_count); ++id) {
      BitString a(f.var_count);
      for (int t = 0; t < f.var_count; ++t)
        a[t] = (id >> (f.var_count - 1 - t)) & 1;
      if (cnf3_evaluate(f, a)) m += 1;
    }
    CHECK(n == m);
  }
}
