// Tests for the weighted-language oracles: weights, prefix masses, local
// conditionals, separation probes, and the exact trie model.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "satlang/dimacs.hpp"
#include "satlang/language.hpp"

using namespace satlang;

namespace {

Formula example_formula() {
  // (A1 OR NOT A2 OR A3) AND (A1 OR NOT A4); 11 of 16 assignments satisfy.
  Expr c1 = Expr::disj(Expr::var(1),
                       Expr::disj(Expr::neg(Expr::var(2)), Expr::var(3)));
  Expr c2 = Expr::disj(Expr::var(1), Expr::neg(Expr::var(4)));
  return Formula(4, Expr::conj(c1, c2));
}

BitString bs(const std::string& s) { return bits_from_string(s); }

Symbol sym(Bit b) { return b ? Symbol::kOne : Symbol::kZero; }

// Sum of the three local conditionals; must be exactly 1 wherever defined.
Rat prob_sum(const SatLanguage& L, const BitString& xhat) {
  return local_prob(L, xhat, Symbol::kZero) +
         local_prob(L, xhat, Symbol::kOne) +
         local_prob(L, xhat, Symbol::kEnd);
}

// Score a full string by chaining local_prob steps (language-level analog
// of chain_rule_score).
Rat chained_local(const SatLanguage& L, const BitString& x) {
  Rat acc(1);
  BitString prefix;
  for (Bit b : x) {
    acc *= local_prob(L, prefix, sym(b));
    prefix.push_back(b);
  }
  return acc * local_prob(L, prefix, Symbol::kEnd);
}

BitString id_to_bits(std::uint32_t id, int len) {
  BitString x(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) x[t] = (id >> (len - 1 - t)) & 1u;
  return x;
}

}  // namespace

TEST_CASE("weights on and off the member set") {
  SatLanguage L = SatLanguage::members_only();
  Formula f = example_formula();
  BitString e = enc(f);

  BitString member = e + bs("1101");
  CHECK(weight(L, member) == third_pow(member.size() + 1));
  CHECK(weight(L, e + bs("0101")) == Rat(0));  // non-satisfying assignment
  CHECK(weight(L, e) == Rat(0));               // assignment missing
  CHECK(weight(L, e + bs("11011")) == Rat(0)); // assignment too long
  CHECK(weight(L, bs("11")) == Rat(1, 27));    // empty formula, no vars

  SatLanguage F = SatLanguage::full_support();
  CHECK(weight(F, BitString{}) == Rat(1, 9));  // epsilon/9 with epsilon=1
  CHECK(weight(F, member) ==
        third_pow(member.size() + 1) + ninth_pow(member.size() + 1));
  SatLanguage F2 = SatLanguage::full_support(Rat(1, 2));
  CHECK(weight(F2, BitString{}) == Rat(1, 18));
  CHECK_THROWS_AS(SatLanguage::full_support(Rat(0)), ArgumentError);
}

TEST_CASE("family restriction to canonical 3-CNF") {
  SatLanguage L = SatLanguage::members_only(Family::kCanonicalCnf3);
  // (A1) is a perfectly decodable formula but not a 3-CNF clause tree.
  Formula a1(1, Expr::var(1));
  CHECK(weight(L, enc(a1) + bs("1")) == Rat(0));
  CHECK(weight(SatLanguage::members_only(), enc(a1) + bs("1")) ==
        third_pow(enc(a1).size() + 2));

  // A genuine 3-CNF member is accepted by both families.
  Cnf3 c;
  c.var_count = 3;
  c.clauses = {{1, -2, 3}};
  Formula f = cnf3_to_formula(c);
  BitString m = enc(f) + bs("111");
  CHECK(weight(L, m) == third_pow(m.size() + 1));
  // The zero-clause formula is canonical 3-CNF too.
  CHECK(weight(L, bs("11")) == Rat(1, 27));
}

TEST_CASE("geometric tail closed form") {
  CHECK(z2_closed_form(0) == Rat(1, 7));
  for (std::size_t len : {0u, 1u, 5u, 12u}) {
    CHECK(z2_closed_form(len) == ninth_pow(len + 1) * Rat(9, 7));
    Rat truncated = z2_truncated(len, 40);
    CHECK(truncated < z2_closed_form(len));  // strictly truncated
    double gap = rat_double(z2_closed_form(len) - truncated);
    CHECK(gap < 1e-12);
    CHECK(gap >= 0.0);
  }
}

TEST_CASE("prefix mass shapes") {
  SatLanguage L = SatLanguage::members_only();
  Formula fp = add_one(example_formula());
  BitString e = enc(fp);

  // Decoded-formula shape: unique continuation after a leading 0.
  PrefixMass m0 = prefix_mass(L, e + bs("0"));
  CHECK(m0.z1 == third_pow(e.size() + 5 + 1));
  CHECK_FALSE(m0.truncated);
  // All twelve members live below the bare encoding.
  PrefixMass me = prefix_mass(L, e);
  CHECK(me.z1 == Rat(12) * third_pow(e.size() + 5 + 1));
  CHECK(me.total == me.z1);
  // The complete member below the all-zeros branch.
  PrefixMass mz = prefix_mass(L, e + bs("00000"));
  CHECK(mz.z1 == third_pow(e.size() + 5 + 1));
  // A longer-than-any-member prefix has no mass.
  CHECK(prefix_mass(L, e + bs("000000")).z1 == Rat(0));

  // Undecodable-garbage shape: a gamma overrun can start no encoding.
  BitString bad(41, 0);
  PrefixMass mb = prefix_mass(L, bad);
  CHECK(mb.z1 == Rat(0));
  CHECK_FALSE(mb.truncated);

  // Inside-an-encoding shape on the unrestricted language: honest
  // truncation at the enumeration cap.
  PrefixMass mo = prefix_mass(L, BitString{});
  CHECK(mo.truncated);
  CHECK(mo.z1 >= Rat(1, 27));  // it saw at least the empty formula's member
  CHECK_THROWS_AS(local_prob(L, BitString{}, Symbol::kZero), CapacityError);

  // The same shape under a length restriction is exact.  The members of
  // length <= 12 come in two kinds: empty-conjunction bodies over j
  // variables (header gamma(j+1)+gamma(1), all 2^j assignments vacuously
  // satisfy, j <= 6 fits) and single-literal bodies ((A1) and NOT A1 over
  // one variable, (A1) over two).
  SatLanguage L12 = L.restricted(12);
  PrefixMass mr = prefix_mass(L12, BitString{});
  CHECK_FALSE(mr.truncated);
  Rat expect = Rat(1, 27)                      // j=0: "11"
               + Rat(2) * third_pow(6)         // j=1 empty body, len 5
               + Rat(4) * third_pow(7)         // j=2 empty body, len 6
               + Rat(8) * third_pow(10)        // j=3 empty body, len 9
               + Rat(16) * third_pow(11)       // j=4 empty body, len 10
               + Rat(32) * third_pow(12)       // j=5 empty body, len 11
               + Rat(64) * third_pow(13)       // j=6 empty body, len 12
               + third_pow(11)                 // (A1), j=1, len 10
               + third_pow(13)                 // NOT A1, j=1, len 12
               + Rat(2) * third_pow(12);       // (A1), j=2, len 11
  CHECK(mr.z1 == expect);
  CHECK(mr.z1 == Rat(66875, 1594323));  // same sum, added by hand

  // Full-support adds the epsilon tail to every shape.
  SatLanguage F = SatLanguage::full_support();
  PrefixMass mf = prefix_mass(F, e);
  CHECK(mf.z2 == z2_closed_form(e.size()));
  CHECK(mf.total == mf.z1 + mf.z2);
}

TEST_CASE("local conditionals: frozen values") {
  SatLanguage L = SatLanguage::members_only();
  Formula f = example_formula();
  BitString e = enc(add_one(f));

  CHECK(local_prob(L, e, Symbol::kZero) == Rat(1, 12));  // 1/(#(f)+1), #=11
  CHECK(local_prob(L, e, Symbol::kOne) == Rat(11, 12));
  CHECK(local_prob(L, e, Symbol::kEnd) == Rat(0));
  CHECK(prob_sum(L, e) == Rat(1));

  // Unsatisfiable base formula: the 1-branch is dead.
  Formula contradiction(1, Expr::conj(Expr::var(1), Expr::neg(Expr::var(1))));
  BitString eu = enc(add_one(contradiction));
  CHECK(local_prob(L, eu, Symbol::kOne) == Rat(0));
  CHECK(local_prob(L, eu, Symbol::kZero) == Rat(1));

  // A complete member continues only with the end marker.
  BitString member = enc(f) + bs("1101");
  CHECK(local_prob(L, member, Symbol::kEnd) == Rat(1));
  CHECK(local_prob(L, member, Symbol::kZero) == Rat(0));

  // Zero-mass prefixes have no conditionals.
  BitString dead = enc(f) + bs("01011");
  CHECK_THROWS_AS(local_prob(L, dead, Symbol::kZero), ArgumentError);

  // Full-support on an undecodable prefix: pure epsilon-tail conditionals.
  SatLanguage F = SatLanguage::full_support();
  BitString bad(41, 0);
  CHECK(local_prob(F, bad, Symbol::kZero) == Rat(1, 9));
  CHECK(local_prob(F, bad, Symbol::kOne) == Rat(1, 9));
  CHECK(local_prob(F, bad, Symbol::kEnd) == Rat(7, 9));
}

TEST_CASE("normalization and consistency along random walks") {
  Rng rng(2026);
  std::vector<SatLanguage> langs = {
      SatLanguage::members_only().restricted(14),
      SatLanguage::full_support().restricted(14),
      SatLanguage::full_support(Rat(1, 3)).restricted(14),
  };
  for (const SatLanguage& L : langs) {
    for (int walk = 0; walk < 12; ++walk) {
      BitString xhat;
      for (int step = 0; step < 14; ++step) {
        PrefixMass parent = prefix_mass(L, xhat);
        PrefixMass left = prefix_mass(L, with_bit(xhat, 0));
        PrefixMass right = prefix_mass(L, with_bit(xhat, 1));
        CHECK(parent.total ==
              left.total + right.total + weight(L, xhat));
        if (sgn(parent.total) > 0) CHECK(prob_sum(L, xhat) == Rat(1));
        xhat.push_back(static_cast<Bit>(rand_bit(rng)));
      }
    }
  }
  // Unrestricted consistency at decoded prefixes.
  SatLanguage L = SatLanguage::full_support();
  Formula f = example_formula();
  BitString e = enc(f);
  for (const BitString& xhat :
       {e, e + bs("1"), e + bs("11"), e + bs("1101"), e + bs("0101")}) {
    PrefixMass parent = prefix_mass(L, xhat);
    CHECK(parent.total == prefix_mass(L, with_bit(xhat, 0)).total +
                              prefix_mass(L, with_bit(xhat, 1)).total +
                              weight(L, xhat));
    CHECK(prob_sum(L, xhat) == Rat(1));
  }
}

TEST_CASE("satisfiability reduction through the 1-branch") {
  SatLanguage L = SatLanguage::members_only();
  Rng rng(77);
  int sat_seen = 0, unsat_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Formula f = random_formula(rng, 8);
    BitString e = enc(add_one(f));
    Int count = count_satisfying(f);
    Rat p1 = local_prob(L, e, Symbol::kOne);
    CHECK((sgn(p1) > 0) == (count > 0));
    CHECK(local_prob(L, e, Symbol::kZero) == Rat(Int(1), count + 1));
    (count > 0 ? sat_seen : unsat_seen)++;
  }
  CHECK(sat_seen > 0);
  CHECK(unsat_seen > 0);
}

TEST_CASE("conditional over assignments is uniform on satisfiers") {
  SatLanguage L = SatLanguage::members_only();
  Rng rng(78);
  int tested = 0;
  while (tested < 20) {
    Formula f = random_formula(rng, 6);
    Int count = count_satisfying(f);
    if (count == 0) continue;
    ++tested;
    BitString e = enc(f);
    Rat z = prefix_mass(L, e).total;
    CHECK(z == Rat(count) * third_pow(e.size() + f.var_count() + 1));
    for (const BitString& a : all_satisfiers(f)) {
      // Chain local probabilities from enc(f) through a to the end marker.
      Rat acc(1);
      BitString xhat = e;
      for (Bit b : a) {
        acc *= local_prob(L, xhat, sym(b));
        xhat.push_back(b);
      }
      acc *= local_prob(L, xhat, Symbol::kEnd);
      CHECK(acc == Rat(Int(1), count));
    }
  }
}

TEST_CASE("separation probe: members-only dichotomy") {
  SatLanguage L = SatLanguage::members_only();
  SeparationProbe probe(Rat(4), 3);  // lambda = 2, k = 3

  Formula unsat(1, Expr::conj(Expr::var(1), Expr::neg(Expr::var(1))));
  SeparationGap gu = separation_gap(L, unsat, probe);
  CHECK(gu.p0 == Rat(1));
  CHECK(gu.bound == Rat(1, 5));
  CHECK(gu.counterfactual_unsat_p0 == Rat(1));
  CHECK_FALSE(gu.decided_sat);

  Formula sat(1, Expr::var(1));
  SeparationGap gs = separation_gap(L, sat, probe);
  CHECK(gs.p0 == Rat(1, 5));
  CHECK(gs.decided_sat);
  // No single value can sit within factor lambda of both cases.
  CHECK(gu.p0 > probe.lambda_sq * gs.p0);

  // lambda = sqrt(2) via its rational square.
  SeparationProbe root2(Rat(2), 2);
  SeparationGap gr = separation_gap(L, sat, root2);
  CHECK(gr.p0 == Rat(1, 3));
  CHECK(gr.decided_sat);
  CHECK(separation_gap(L, unsat, root2).p0 == Rat(1));

  // Probe validation.
  CHECK_THROWS_AS(SeparationProbe(Rat(4), 2), ArgumentError);   // k too small
  CHECK_THROWS_AS(SeparationProbe(Rat(1, 2), 1), ArgumentError);
  CHECK(SeparationProbe::from_lambda(Rat(2), 3).lambda_sq == Rat(4));
}

TEST_CASE("separation probe: full-support ratio bound") {
  SatLanguage F = SatLanguage::full_support();
  SeparationProbe probe(Rat(4), 3, Rat(1));
  CHECK(probe.k == 3);

  Rng rng(79);
  int sat_tested = 0, unsat_tested = 0;
  while (sat_tested < 12 || unsat_tested < 4) {
    Formula f = random_formula(rng, 5);
    SeparationGap g = separation_gap(F, f, probe);
    CHECK(g.bound == Rat(35, 9));  // (1+2^2)/(1+2/7)
    bool is_sat = count_satisfying(f) > 0;
    if (is_sat) {
      ++sat_tested;
      // Ratio law: the unsat-case value dwarfs the satisfiable-case one.
      CHECK(g.counterfactual_unsat_p0 >= g.bound * g.p0);
      CHECK(g.decided_sat);
    } else {
      ++unsat_tested;
      // The closed-form counterfactual IS the actual value when phi is
      // unsatisfiable.
      CHECK(g.p0 == g.counterfactual_unsat_p0);
      CHECK_FALSE(g.decided_sat);
    }
  }

  // Mismatched epsilon is refused, as is a restricted language.
  CHECK_THROWS_AS(
      separation_gap(SatLanguage::full_support(Rat(2)), example_formula(),
                     probe),
      ArgumentError);
  CHECK_THROWS_AS(
      separation_gap(F.restricted(10), example_formula(), probe),
      ArgumentError);
}

TEST_CASE("trie model matches the restricted language exactly") {
  for (const SatLanguage& base :
       {SatLanguage::members_only(), SatLanguage::full_support()}) {
    const int n = 10;
    SatLanguage Ln = base.restricted(n);
    TrieModel trie(base, n);
    CHECK(trie.max_len() == n);
    CHECK(trie.total_mass() == prefix_mass(Ln, {}).total);
    for (int len = 0; len <= n; ++len) {
      for (std::uint32_t id = 0; id < (1u << len); ++id) {
        BitString xhat = id_to_bits(id, len);
        PrefixMass pm = prefix_mass(Ln, xhat);
        CHECK(trie.mass(xhat) == pm.total);
        CHECK(trie.reachable(xhat) == (sgn(pm.total) > 0));
        if (sgn(pm.total) > 0) {
          for (Symbol s : {Symbol::kZero, Symbol::kOne, Symbol::kEnd})
            CHECK(trie.prob(xhat, s) == local_prob(Ln, xhat, s));
          CHECK(trie.prob(xhat, Symbol::kZero) +
                    trie.prob(xhat, Symbol::kOne) +
                    trie.prob(xhat, Symbol::kEnd) ==
                Rat(1));
        }
      }
    }
  }
}

TEST_CASE("trie chain-rule scores recover normalized weights") {
  SatLanguage L = SatLanguage::members_only();
  const int n = 12;
  TrieModel trie(L, n);
  SatLanguage Ln = L.restricted(n);
  Rat z = trie.total_mass();
  CHECK(sgn(z) > 0);

  // Enumerate every string up to length n; 131 are members (127 from
  // empty-conjunction bodies with 0 <= j <= 6, four from single literals).
  int members = 0;
  for (int len = 0; len <= n; ++len) {
    for (std::uint32_t id = 0; id < (1u << len); ++id) {
      BitString x = id_to_bits(id, len);
      Rat w = weight(Ln, x);
      if (sgn(w) > 0) {
        ++members;
        CHECK(chain_rule_score(trie, x) == w / z);
        CHECK(chained_local(Ln, x) == w / z);
        CHECK(trie.prob(x, Symbol::kEnd) == Rat(1));  // members are leaves
      } else {
        CHECK(chain_rule_score(trie, x) == Rat(0));
      }
    }
  }
  CHECK(members == 131);
  CHECK_THROWS_AS(chain_rule_score(trie, BitString(n + 1, 0)), ArgumentError);

  // Unreachable prefixes are genuinely absent, not stored as zeros.  The
  // only member starting with '1' is "11", so nothing lives under "10" or
  // past "11"; "00" is reachable via the j >= 3 headers.
  CHECK_FALSE(trie.reachable(bs("10")));
  CHECK_FALSE(trie.reachable(bs("111")));
  CHECK(trie.reachable(bs("0")));
  CHECK(trie.reachable(bs("00")));
  CHECK(trie.reachable(bs("11")));
  CHECK(trie.node_count() == 284);

  // Full-support chain rule: score(x) = weight(x)/Z for EVERY x.
  SatLanguage F = SatLanguage::full_support();
  TrieModel ftrie(F, 6);
  SatLanguage F6 = F.restricted(6);
  Rat fz = ftrie.total_mass();
  for (int len = 0; len <= 6; ++len)
    for (std::uint32_t id = 0; id < (1u << len); ++id) {
      BitString x = id_to_bits(id, len);
      CHECK(chain_rule_score(ftrie, x) == weight(F6, x) / fz);
    }
}

TEST_CASE("uniform local model and trie capacity") {
  UniformLocalModel u(9);
  Rng rng(11);
  for (int len : {0, 1, 4, 9}) {
    BitString x;
    for (int t = 0; t < len; ++t) x.push_back(static_cast<Bit>(rand_bit(rng)));
    CHECK(chain_rule_score(u, x) == third_pow(x.size() + 1));
  }
  CHECK_THROWS_AS(chain_rule_score(u, BitString(10, 1)), ArgumentError);
  CHECK_THROWS_AS(TrieModel(SatLanguage::members_only(), 21), CapacityError);
}

TEST_CASE("restricted total mass grows monotonically and stays below one") {
  Rat prev(0);
  for (int n = 2; n <= 14; n += 2) {
    TrieModel trie(SatLanguage::members_only(), n);
    Rat z = trie.total_mass();
    CHECK(z >= prev);
    CHECK(z <= Rat(1));
    prev = z;
  }
  CHECK(sgn(prev) > 0);
}

TEST_CASE("trie sampling is exact and deterministic") {
  SatLanguage L = SatLanguage::members_only();
  TrieModel trie(L, 12);
  SatLanguage L12 = L.restricted(12);
  Rng rng(123);
  std::set<std::string> seen;
  for (int i = 0; i < 300; ++i) {
    BitString x = trie.sample(rng);
    CHECK(sgn(weight(L12, x)) > 0);  // every sample is a member
    seen.insert(bits_to_string(x));
  }
  CHECK(seen.size() > 1);  // more than one member gets sampled

  Rng rng2(123);
  for (int i = 0; i < 50; ++i) {
    Rng probe1(derive_seed(9000, static_cast<std::uint64_t>(i)));
    Rng probe2(derive_seed(9000, static_cast<std::uint64_t>(i)));
    CHECK(trie.sample(probe1) == trie.sample(probe2));
  }

  // A trie with zero mass refuses to sample.
  TrieModel empty(SatLanguage::members_only(), 1);
  Rng r3(1);
  CHECK_THROWS_AS(empty.sample(r3), ArgumentError);
  CHECK(empty.node_count() == 0);
}
