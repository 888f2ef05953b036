// Tests for the compact witness network.  The scanner inside WitnessRnn is
// an independent implementation of the canonical-3-CNF membership language,
// so the central test is exhaustive agreement with the decoder-based weight
// oracle, plus targeted long strings that exercise the clause units (no
// member short enough for the exhaustive sweep contains an actual clause).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <set>
#include <vector>

#include "satlang/dimacs.hpp"
#include "satlang/formula.hpp"
#include "satlang/language.hpp"
#include "satlang/rng.hpp"
#include "satlang/witness.hpp"

using namespace satlang;

namespace {

BitString bs(const std::string& s) { return bits_from_string(s); }

BitString id_to_bits(unsigned long long id, int n) {
  BitString x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    x[static_cast<std::size_t>(i)] = static_cast<Bit>((id >> (n - 1 - i)) & 1);
  return x;
}

const SatLanguage& oracle() {
  static SatLanguage lang = SatLanguage::members_only(Family::kCanonicalCnf3);
  return lang;
}

// enc(phi) ++ assignment, the member shape.
BitString member_string(const Formula& phi, const BitString& a) {
  return enc(phi) + a;
}

}  // namespace

TEST_CASE("clause universe enumerates every 3-literal clause exactly once") {
  ClauseUniverse u5(5);
  CHECK(u5.size() == 80);  // 8 * C(5,3)
  CHECK(ClauseUniverse(3).size() == 8);
  CHECK(ClauseUniverse(7).size() == 280);
  CHECK(ClauseUniverse(12).size() == 1760);
  CHECK(ClauseUniverse(2).size() == 0);
  CHECK(ClauseUniverse(0).size() == 0);

  for (std::size_t i = 0; i < u5.size(); ++i) {
    LitClause c = u5.clause(i);
    CHECK(1 <= c.v1);
    CHECK(c.v1 < c.v2);
    CHECK(c.v2 < c.v3);
    CHECK(c.v3 <= 5);
    CHECK(u5.index_of(c.v1, c.neg1, c.v2, c.neg2, c.v3, c.neg3) == i);
    // Argument order must not matter.
    CHECK(u5.index_of(c.v3, c.neg3, c.v1, c.neg1, c.v2, c.neg2) == i);
    CHECK(u5.index_of(c.v2, c.neg2, c.v3, c.neg3, c.v1, c.neg1) == i);
  }

  ClauseUniverse u3(3);
  CHECK(u3.clause(0) == LitClause{1, 2, 3, false, false, false});
  CHECK(u3.clause(7) == LitClause{1, 2, 3, true, true, true});
  CHECK(u3.index_of(1, false, 2, false, 3, true) == 1);
  CHECK(u3.index_of(1, true, 2, false, 3, false) == 4);

  CHECK_THROWS_AS(u3.clause(8), ArgumentError);
  CHECK_THROWS_AS(u3.index_of(1, false, 1, true, 2, false), ArgumentError);
  CHECK_THROWS_AS(u3.index_of(0, false, 2, false, 3, false), ArgumentError);
  CHECK_THROWS_AS(u5.index_of(1, false, 2, false, 6, false), ArgumentError);
  CHECK_THROWS_AS(ClauseUniverse(-1), ArgumentError);
}

TEST_CASE("frozen evaluations on the shortest members") {
  WitnessRnn w2(2);
  CHECK(w2.evaluate(bs("11")) == Rat(1, 27));
  CHECK(w2.evaluate(bs("00")) == 0);
  CHECK(w2.evaluate(bs("01")) == 0);
  CHECK(w2.evaluate(bs("10")) == 0);

  // Variable-count 1, empty body: header 0101, no roster, one assignment bit.
  WitnessRnn w5(5);
  CHECK(w5.evaluate(bs("01010")) == third_pow(6));
  CHECK(w5.evaluate(bs("01011")) == third_pow(6));
  CHECK(w5.evaluate(bs("11011")) == 0);

  for (int n : {1, 2, 3, 8, 13, 30}) {
    WitnessRnn w(n);
    CHECK(w.evaluate(BitString(static_cast<std::size_t>(n), 0)) == 0);
  }

  CHECK_THROWS_AS(WitnessRnn(2).evaluate(bs("111")), ArgumentError);
  CHECK_THROWS_AS(WitnessRnn(-1), ArgumentError);
  CHECK_THROWS_AS(WitnessRnn(4, -1), ArgumentError);
}

TEST_CASE("matches the exact language on every string up to length 13") {
  long nonzero = 0;
  for (int n = 0; n <= 13; ++n) {
    WitnessRnn w(n);
    for (unsigned long long id = 0; id < (1ull << n); ++id) {
      BitString x = id_to_bits(id, n);
      Rat got = w.evaluate(x);
      Rat want = weight(oracle(), x);
      REQUIRE(got == want);
      if (got != 0) ++nonzero;
    }
  }
  // All members this short have empty bodies: variable counts 0..6 give
  // 1 + 2 + 4 + 8 + 16 + 32 + 64 accepted strings.
  CHECK(nonzero == 127);
}

TEST_CASE("clause units drive acceptance on real 3-CNF members") {
  const std::vector<std::string> texts = {
      "1 - 2 3",
      "1 2 3 # 1 2 3",            // duplicated clause
      "1 2 3 # - 1 - 2 - 3",      // complementary pair of clauses
      "1 2 3 # - 3 4 5 # - 1 - 4 2",
  };
  for (const std::string& text : texts) {
    CAPTURE(text);
    Cnf3 f = dimacs_decode(text);
    Formula phi = cnf3_to_formula(f);
    int j = phi.var_count();
    BitString e = enc(phi);
    int n = static_cast<int>(e.size()) + j;
    WitnessRnn w(n);

    long satisfiers = 0;
    for (unsigned long long id = 0; id < (1ull << j); ++id) {
      BitString a = id_to_bits(id, j);
      BitString x = member_string(phi, a);
      Rat got = w.evaluate(x);
      CHECK(got == weight(oracle(), x));
      if (cnf3_evaluate(f, a)) {
        CHECK(got == third_pow(static_cast<unsigned long>(n) + 1));
        ++satisfiers;
      } else {
        CHECK(got == 0);
      }
    }
    CHECK(satisfiers > 0);
    CHECK(satisfiers < (1ll << j));

    // Single-bit corruptions must agree with the oracle as well.  A
    // corrupted header can, in principle, declare a variable count beyond
    // the witness capacity; the network refuses those rather than guessing.
    BitString base = member_string(phi, id_to_bits(0, j));
    for (std::size_t p = 0; p < base.size(); ++p) {
      BitString x = base;
      x[p] = static_cast<Bit>(1 - x[p]);
      try {
        Rat got = w.evaluate(x);
        CHECK(got == weight(oracle(), x));
      } catch (const CapacityError&) {
        // Legitimate refusal: the corrupted header exceeded the cap.
      }
    }
  }
}

TEST_CASE("three-clause formula: frozen satisfier count") {
  // (A1 v A2 v A3) & (~A1 v ~A2 v ~A3) excludes 000 and 111.
  Cnf3 f = dimacs_decode("1 2 3 # - 1 - 2 - 3");
  long sat = 0;
  for (unsigned long long id = 0; id < 8; ++id)
    if (cnf3_evaluate(f, id_to_bits(id, 3))) ++sat;
  CHECK(sat == 6);
}

TEST_CASE("clause units stay digital and a surviving unit forces zero") {
  Cnf3 f = dimacs_decode("1 2 3 # - 1 4 5");
  Formula phi = cnf3_to_formula(f);
  int j = phi.var_count();
  REQUIRE(j == 5);
  BitString e = enc(phi);
  int n = static_cast<int>(e.size()) + j;
  WitnessRnn w(n);

  auto check_digital = [](const WitnessTrace& t) {
    for (const auto& [idx, h] : t.clause_units) {
      (void)idx;
      CHECK(h == Rat(1));  // absent units are exactly 0
    }
    CHECK((t.fail == 0 || t.fail == Rat(1)));
  };

  // Assignment 00011: first clause (A1 v A2 v A3) has no satisfied literal,
  // second clause is satisfied by ~A1.  Exactly one unit must survive.
  {
    BitString x = member_string(phi, bs("00011"));
    std::size_t steps = 0;
    std::map<std::size_t, Rat> last_units;
    Rat last_fail;
    Rat got = w.evaluate(x, [&](const WitnessTrace& t) {
      check_digital(t);
      ++steps;
      CHECK(t.step == steps);
      last_units = t.clause_units;
      last_fail = t.fail;
    });
    CHECK(got == 0);
    CHECK(steps == static_cast<std::size_t>(n));
    CHECK(last_fail == 0);
    REQUIRE(last_units.size() == 1);
    CHECK(last_units.begin()->first ==
          w.universe().index_of(1, false, 2, false, 3, false));
    CHECK(last_units.begin()->second == Rat(1));
  }

  // A satisfying assignment clears every unit.
  {
    BitString x = member_string(phi, bs("10011"));
    REQUIRE(cnf3_evaluate(f, bs("10011")));
    std::map<std::size_t, Rat> last_units;
    Rat got = w.evaluate(x, [&](const WitnessTrace& t) {
      check_digital(t);
      last_units = t.clause_units;
    });
    CHECK(got == third_pow(static_cast<unsigned long>(n) + 1));
    CHECK(last_units.empty());
  }
}

TEST_CASE("a duplicated clause saturates its unit at exactly one") {
  Cnf3 f = dimacs_decode("1 2 3 # 1 2 3");
  Formula phi = cnf3_to_formula(f);
  int j = phi.var_count();
  BitString e = enc(phi);
  int n = static_cast<int>(e.size()) + j;
  WitnessRnn w(n);

  std::size_t max_live = 0;
  BitString x = member_string(phi, bs("000"));
  Rat got = w.evaluate(x, [&](const WitnessTrace& t) {
    max_live = std::max(max_live, t.clause_units.size());
    for (const auto& [idx, h] : t.clause_units) {
      (void)idx;
      CHECK(h == Rat(1));  // the second arrival must not push it to 2
    }
  });
  CHECK(got == 0);        // 000 satisfies neither copy
  CHECK(max_live == 1);   // both copies map to the same unit

  CHECK(w.evaluate(member_string(phi, bs("100"))) ==
        third_pow(static_cast<unsigned long>(n) + 1));
}

TEST_CASE("decoded variable counts beyond the cap are refused, not zeroed") {
  // Empty-body formula with 13 variables: header, roster of 13 ones, then
  // 13 assignment bits.  It is a genuine member of length 34.
  Formula wide(13, Expr::truth());
  BitString x = member_string(wide, BitString(13, 1));
  REQUIRE(x.size() == 34);

  WitnessRnn capped(34);  // default cap: 12 variables
  CHECK_THROWS_AS(capped.evaluate(x), CapacityError);

  WitnessRnn roomy(34, 13);
  CHECK(roomy.evaluate(x) == third_pow(35));
  CHECK(roomy.evaluate(x) == weight(oracle(), x));

  // Headers declaring var counts too large for any member of this length
  // are massless, so they report zero rather than refusing.
  BitString hopeless = bs("0000100011");  // 18 variables, needs length >= 36
  hopeless.resize(34, 1);
  WitnessRnn w(34, 16);
  CHECK(w.evaluate(hopeless) == 0);
  CHECK(weight(oracle(), hopeless) == 0);
}

TEST_CASE("random 3-CNF formulas agree with the decoder oracle") {
  Rng rng(derive_seed(0x5eedc0de, 31));
  const SatLanguage& lang = oracle();
  int nonzero = 0;
  int capacity_refusals = 0;
  for (int round = 0; round < 60; ++round) {
    int j = 3 + static_cast<int>(rand_below(rng, 5));  // 3..7 variables
    int c = 1 + static_cast<int>(rand_below(rng, 5));  // 1..5 clauses
    Cnf3 f;
    f.var_count = j;
    for (int k = 0; k < c; ++k) {
      std::vector<int> vars(static_cast<std::size_t>(j));
      for (int v = 0; v < j; ++v) vars[static_cast<std::size_t>(v)] = v + 1;
      for (int pick = 0; pick < 3; ++pick) {
        std::size_t at = pick + static_cast<std::size_t>(rand_below(
                                    rng, static_cast<std::uint64_t>(j - pick)));
        std::swap(vars[static_cast<std::size_t>(pick)], vars[at]);
      }
      std::vector<int> clause;
      for (int pick = 0; pick < 3; ++pick) {
        int lit = vars[static_cast<std::size_t>(pick)];
        clause.push_back(rand_bit(rng) ? -lit : lit);
      }
      f.clauses.push_back(std::move(clause));
    }
    Formula phi = cnf3_to_formula(f);
    BitString e = enc(phi);
    int n = static_cast<int>(e.size()) + j;
    WitnessRnn w(n);

    for (int t = 0; t < 4; ++t) {
      BitString a;
      for (int v = 0; v < j; ++v) a.push_back(rand_bit(rng));
      BitString x = member_string(phi, a);
      Rat got = w.evaluate(x);
      CHECK(got == weight(lang, x));
      if (got != 0) ++nonzero;
    }
    for (int t = 0; t < 4; ++t) {
      BitString x;
      for (int b = 0; b < n; ++b) x.push_back(rand_bit(rng));
      try {
        Rat got = w.evaluate(x);
        CHECK(got == weight(lang, x));
      } catch (const CapacityError&) {
        ++capacity_refusals;  // random headers can overshoot the cap
      }
    }
  }
  CHECK(nonzero > 0);
  CHECK(capacity_refusals < 30);  // refusals must stay the rare exception
}

TEST_CASE("serialized description is logarithmic in the input length") {
  for (int n : {0, 1, 2, 13, 14, 127, 128, 1000, 100000}) {
    WitnessRnn w = build_witness(n);
    std::vector<std::uint8_t> bytes = w.serialize();
    int log_n = std::bit_width(static_cast<unsigned>(std::max(n, 1)));
    CHECK(8 * static_cast<int>(bytes.size()) <= 2 * log_n + 16);
    WitnessRnn back = WitnessRnn::deserialize(bytes);
    CHECK(back.n() == n);
  }

  // A deserialized network evaluates identically.
  WitnessRnn w(13);
  WitnessRnn back = WitnessRnn::deserialize(w.serialize());
  Rng rng(derive_seed(0x5eedc0de, 32));
  for (int t = 0; t < 50; ++t) {
    BitString x;
    for (int b = 0; b < 13; ++b) x.push_back(rand_bit(rng));
    CHECK(w.evaluate(x) == back.evaluate(x));
  }

  CHECK_THROWS_AS(WitnessRnn::deserialize({}), ArgumentError);
  CHECK_THROWS_AS(WitnessRnn::deserialize({0x80}), ArgumentError);
  CHECK_THROWS_AS(WitnessRnn::deserialize({0x05, 0x00}), ArgumentError);
}

TEST_CASE("eval_witness and build_witness free functions") {
  WitnessRnn w = build_witness(2);
  CHECK(eval_witness(w, bs("11")) == Rat(1, 27));
  CHECK(eval_witness(w, bs("10")) == 0);
}
