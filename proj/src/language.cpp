// language.cpp -- exact weighted-language evaluators, separation probes,
// and the trie-backed local model.

#include "satlang/language.hpp"

#include <algorithm>
#include <functional>

#include "satlang/dimacs.hpp"

namespace satlang {

namespace {

bool family_ok(const SatLanguage& L, const Formula& f) {
  switch (L.family) {
    case Family::kAll:
      return true;
    case Family::kCanonicalCnf3:
      return formula_to_cnf3(f, nullptr);
  }
  return false;
}

// The (1/9)-tail for a prefix of length `len`, honoring a length limit.
Rat z2_for(const SatLanguage& L, std::size_t len) {
  if (!L.length_limit) return z2_closed_form(len);
  std::size_t limit = static_cast<std::size_t>(*L.length_limit);
  if (len > limit) return Rat(0);
  unsigned long depth = static_cast<unsigned long>(limit - len);
  // sum_{d=0}^{depth} (2/9)^d = (1 - (2/9)^{depth+1}) / (7/9)
  Rat geo = (Rat(1) - rat_pow(Rat(2, 9), depth + 1)) / Rat(7, 9);
  return ninth_pow(len + 1) * geo;
}

// Depth-first walk over every formula whose encoding extends `e`, bounded
// by `cap` total encoding bits.  Precondition: dec on the initial `e`
// reports kNeedMoreBits (the caller has handled the other shapes), which
// guarantees every successful decode below consumes its whole string.
// Returns true iff no live branch was cut off at the cap.
bool walk_encodings(BitString& e, std::size_t cap,
                    const std::function<void(const Formula&, const BitString&)>&
                        visit) {
  DecodeError err;
  if (auto res = dec(e, &err)) {
    visit(res->formula, e);
    return true;  // prefix-freeness: nothing decodable extends this point
  }
  if (err.kind == DecodeFailure::kInvalid) return true;  // dead branch
  if (e.size() >= cap) return false;                     // live branch cut
  bool exhaustive = true;
  for (Bit b : {Bit{0}, Bit{1}}) {
    e.push_back(b);
    exhaustive = walk_encodings(e, cap, visit) && exhaustive;
    e.pop_back();
  }
  return exhaustive;
}

struct Z1Mass {
  Rat mass;
  bool truncated = false;
};

// Member-continuation mass for a prefix, by shape:
//   decoded formula prefix  -> closed form over remaining assignment bits
//   kNeedMoreBits           -> bounded enumeration of extending encodings
//   kInvalid                -> zero
Z1Mass z1_mass(const SatLanguage& L, const BitString& xhat) {
  DecodeError err;
  if (auto res = dec(xhat, &err)) {
    const Formula& f = res->formula;
    std::size_t c = res->consumed;
    std::size_t j = static_cast<std::size_t>(f.var_count());
    std::size_t rem = xhat.size() - c;
    if (rem > j) return {Rat(0)};  // longer than any member of this formula
    if (!family_ok(L, f)) return {Rat(0)};
    if (L.length_limit && c + j > static_cast<std::size_t>(*L.length_limit))
      return {Rat(0)};
    BitString r(xhat.begin() + static_cast<std::ptrdiff_t>(c), xhat.end());
    Int cnt = count_satisfying_extensions(f, r, L.assignment_cap);
    return {Rat(cnt) * third_pow(c + j + 1)};
  }
  if (err.kind == DecodeFailure::kInvalid) return {Rat(0)};

  std::size_t cap = L.length_limit
                        ? static_cast<std::size_t>(*L.length_limit)
                        : static_cast<std::size_t>(L.prefix_total_cap);
  Rat total(0);
  bool exhaustive;
  if (xhat.size() >= cap) {
    exhaustive = false;  // cannot extend the encoding at all
  } else {
    BitString e = xhat;
    exhaustive = walk_encodings(
        e, cap, [&](const Formula& f, const BitString& ee) {
          if (!family_ok(L, f)) return;
          std::size_t j = static_cast<std::size_t>(f.var_count());
          if (L.length_limit &&
              ee.size() + j > static_cast<std::size_t>(*L.length_limit))
            return;
          total += Rat(count_satisfying(f, L.assignment_cap)) *
                   third_pow(ee.size() + j + 1);
        });
  }
  // Under a length limit the cut branches carry encodings longer than the
  // limit, whose members are all outside the restriction: still exact.
  return {total, L.length_limit ? false : !exhaustive};
}

Symbol bit_symbol(Bit b) { return b ? Symbol::kOne : Symbol::kZero; }

}  // namespace

SatLanguage SatLanguage::members_only(Family f) {
  SatLanguage L;
  L.variant = Variant::kMembersOnly;
  L.family = f;
  return L;
}

SatLanguage SatLanguage::full_support(const Rat& eps, Family f) {
  if (sgn(eps) <= 0)
    throw ArgumentError("full_support epsilon must be positive");
  SatLanguage L;
  L.variant = Variant::kFullSupport;
  L.family = f;
  L.epsilon = eps;
  return L;
}

SatLanguage SatLanguage::restricted(int n) const {
  if (n < 0) throw ArgumentError("length limit must be non-negative");
  SatLanguage L = *this;
  L.length_limit = length_limit ? std::min(*length_limit, n) : n;
  return L;
}

Rat weight(const SatLanguage& L, const BitString& x) {
  if (L.length_limit && x.size() > static_cast<std::size_t>(*L.length_limit))
    return Rat(0);
  Rat w(0);
  if (auto res = dec(x)) {
    const Formula& f = res->formula;
    std::size_t j = static_cast<std::size_t>(f.var_count());
    if (x.size() - res->consumed == j && family_ok(L, f)) {
      BitString a(x.begin() + static_cast<std::ptrdiff_t>(res->consumed),
                  x.end());
      if (evaluate(f, a)) w = third_pow(x.size() + 1);
    }
  }
  if (L.variant == Variant::kFullSupport)
    w += L.epsilon * ninth_pow(x.size() + 1);
  return w;
}

Rat z2_closed_form(std::size_t prefix_len) {
  return ninth_pow(prefix_len + 1) * Rat(9, 7);
}

Rat z2_truncated(std::size_t prefix_len, std::size_t depth) {
  Rat acc(0);
  for (std::size_t d = 0; d <= depth; ++d) {
    acc += Rat(int_pow(2, static_cast<unsigned long>(d))) *
           ninth_pow(prefix_len + d + 1);
  }
  return acc;
}

PrefixMass prefix_mass(const SatLanguage& L, const BitString& xhat) {
  Z1Mass z1 = z1_mass(L, xhat);
  PrefixMass m;
  m.z1 = z1.mass;
  m.z2 = z2_for(L, xhat.size());
  m.total = m.z1;
  if (L.variant == Variant::kFullSupport) m.total += L.epsilon * m.z2;
  m.truncated = z1.truncated;
  return m;
}

Rat local_prob(const SatLanguage& L, const BitString& xhat, Symbol s) {
  PrefixMass parent = prefix_mass(L, xhat);
  if (parent.truncated)
    throw CapacityError(
        "prefix mass truncated at the enumeration cap; local probabilities "
        "are only exact for prefixes whose formula part is decoded");
  if (sgn(parent.total) == 0)
    throw ArgumentError(
        "local probability undefined: prefix has zero mass under the "
        "language");
  if (s == Symbol::kEnd) return weight(L, xhat) / parent.total;
  PrefixMass child =
      prefix_mass(L, with_bit(xhat, s == Symbol::kOne ? 1 : 0));
  if (child.truncated)
    throw CapacityError(
        "child prefix mass truncated at the enumeration cap");
  return child.total / parent.total;
}

SeparationProbe::SeparationProbe(const Rat& lambda_sq_, int k_, const Rat& eps)
    : lambda_sq(lambda_sq_), k(k_), epsilon(eps) {
  if (lambda_sq < Rat(1))
    throw ArgumentError("approximation factor must satisfy lambda >= 1");
  if (sgn(epsilon) <= 0) throw ArgumentError("epsilon must be positive");
  int k_min = choose_k_sq(lambda_sq);
  if (k < k_min)
    throw ArgumentError("k too small for lambda: need k >= " +
                        std::to_string(k_min));
}

SeparationProbe SeparationProbe::from_lambda(const Rat& lambda, int k_,
                                             const Rat& eps) {
  return SeparationProbe(lambda * lambda, k_, eps);
}

SeparationGap separation_gap(const SatLanguage& L, const Formula& phi,
                             const SeparationProbe& probe) {
  if (L.length_limit)
    throw ArgumentError("separation probes require the unrestricted language");
  if (L.variant == Variant::kFullSupport && probe.epsilon != L.epsilon)
    throw ArgumentError("probe epsilon does not match the language epsilon");

  Formula phip = add_one_and_blow_up(phi, probe.k);
  BitString xhat = enc(phip);

  SeparationGap g;
  g.p0 = local_prob(L, xhat, Symbol::kZero);
  Int spread = 1 + int_pow(2, static_cast<unsigned long>(probe.k - 1));

  if (L.variant == Variant::kMembersOnly) {
    g.bound = Rat(Int(1), spread);
    g.counterfactual_unsat_p0 = Rat(1);
    g.decided_sat = probe.lambda_sq * g.p0 < Rat(1);
  } else {
    std::size_t nh = xhat.size();
    std::size_t jp =
        static_cast<std::size_t>(phi.var_count() + probe.k);
    Rat w = third_pow(nh + jp + 1);
    Rat e2 = L.epsilon * z2_closed_form(nh);
    g.counterfactual_unsat_p0 = (w + e2 / Rat(9)) / (w + e2);
    g.bound = Rat(spread) / (Rat(1) + Rat(2) * L.epsilon / Rat(7));
    g.decided_sat = g.p0 * g.bound <= g.counterfactual_unsat_p0;
  }
  return g;
}

Rat chain_rule_score(const LocalModel& q, const BitString& x) {
  if (x.size() > static_cast<std::size_t>(q.max_len()))
    throw ArgumentError("string longer than the model's max_len");
  Rat acc(1);
  BitString prefix;
  prefix.reserve(x.size());
  for (Bit b : x) {
    acc *= q.prob(prefix, bit_symbol(b));
    if (sgn(acc) == 0) return Rat(0);  // left the model's support
    prefix.push_back(b);
  }
  return acc * q.prob(prefix, Symbol::kEnd);
}

Rat UniformLocalModel::prob(const BitString& xhat, Symbol) const {
  if (xhat.size() > static_cast<std::size_t>(max_len_))
    throw ArgumentError("prefix longer than the model's max_len");
  return Rat(1, 3);
}

TrieModel::TrieModel(const SatLanguage& L, int n, int trie_cap)
    : lang_(L.restricted(n)) {
  if (n > trie_cap)
    throw CapacityError("trie depth " + std::to_string(n) +
                        " exceeds the cap " + std::to_string(trie_cap));
  n_ = *lang_.length_limit;
  BitString e;
  walk_encodings(
      e, static_cast<std::size_t>(n_),
      [&](const Formula& f, const BitString& ee) {
        if (!family_ok(lang_, f)) return;
        std::size_t j = static_cast<std::size_t>(f.var_count());
        if (ee.size() + j > static_cast<std::size_t>(n_)) return;
        for (const BitString& a : all_satisfiers(f, lang_.assignment_cap)) {
          BitString m = ee + a;
          Rat w = third_pow(m.size() + 1);
          member_weight_[m] = w;
          BitString p;
          p.reserve(m.size());
          z1_[p] += w;
          for (Bit b : m) {
            p.push_back(b);
            z1_[p] += w;
          }
        }
      });
}

Rat TrieModel::z1_at(const BitString& xhat) const {
  auto it = z1_.find(xhat);
  return it == z1_.end() ? Rat(0) : it->second;
}

Rat TrieModel::mass(const BitString& xhat) const {
  if (xhat.size() > static_cast<std::size_t>(n_)) return Rat(0);
  Rat m = z1_at(xhat);
  if (lang_.variant == Variant::kFullSupport)
    m += lang_.epsilon * z2_for(lang_, xhat.size());
  return m;
}

bool TrieModel::reachable(const BitString& xhat) const {
  return sgn(mass(xhat)) > 0;
}

Rat TrieModel::prob(const BitString& xhat, Symbol s) const {
  if (xhat.size() > static_cast<std::size_t>(n_))
    throw ArgumentError("prefix longer than the model's max_len");
  Rat z = mass(xhat);
  if (sgn(z) == 0)
    throw ArgumentError(
        "local probability undefined: prefix has zero mass under the trie");
  if (s == Symbol::kEnd) {
    auto it = member_weight_.find(xhat);
    Rat w = it == member_weight_.end() ? Rat(0) : it->second;
    if (lang_.variant == Variant::kFullSupport)
      w += lang_.epsilon * ninth_pow(xhat.size() + 1);
    return w / z;
  }
  return mass(with_bit(xhat, s == Symbol::kOne ? 1 : 0)) / z;
}

BitString TrieModel::sample(Rng& rng) const {
  if (sgn(total_mass()) == 0)
    throw ArgumentError("cannot sample: the model's total mass is zero");
  BitString prefix;
  while (true) {
    Rat q0 = prob(prefix, Symbol::kZero);
    Rat q1 = prob(prefix, Symbol::kOne);
    Rat u = rand_unit_rat(rng);
    if (u < q0) {
      prefix.push_back(0);
    } else if (u < q0 + q1) {
      prefix.push_back(1);
    } else {
      return prefix;
    }
  }
}

}  // namespace satlang
