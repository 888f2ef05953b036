// witness.cpp -- streaming evaluation of the compact witness network.

#include "satlang/witness.hpp"

#include <algorithm>
#include <bit>
#include <utility>

namespace satlang {

// --- clause universe ------------------------------------------------------

ClauseUniverse::ClauseUniverse(int j) : j_(j) {
  if (j < 0) throw ArgumentError("clause universe needs a nonnegative size");
  for (int a = 1; a <= j; ++a)
    for (int b = a + 1; b <= j; ++b)
      for (int c = b + 1; c <= j; ++c) {
        rank_[{a, b, c}] = triples_.size();
        triples_.push_back({a, b, c});
      }
}

LitClause ClauseUniverse::clause(std::size_t index) const {
  if (index >= size()) throw ArgumentError("clause index out of range");
  const auto& t = triples_[index / 8];
  std::size_t s = index % 8;
  return LitClause{t[0],        t[1],        t[2],
                   (s & 4) != 0, (s & 2) != 0, (s & 1) != 0};
}

std::size_t ClauseUniverse::index_of(int va, bool na, int vb, bool nb, int vc,
                                     bool nc) const {
  std::array<std::pair<int, bool>, 3> lits{{{va, na}, {vb, nb}, {vc, nc}}};
  std::sort(lits.begin(), lits.end());
  if (lits[0].first == lits[1].first || lits[1].first == lits[2].first)
    throw ArgumentError("clause variables must be distinct");
  if (lits[0].first < 1 || lits[2].first > j_)
    throw ArgumentError("clause variable out of range");
  auto it = rank_.find({lits[0].first, lits[1].first, lits[2].first});
  std::size_t s = (lits[0].second ? 4u : 0u) | (lits[1].second ? 2u : 0u) |
                  (lits[2].second ? 1u : 0u);
  return it->second * 8 + s;
}

// --- scanner ----------------------------------------------------------------

namespace {

// The controller's finite phase.  kSink is the absorbing failure phase: the
// sticky fail unit is already 1, remaining symbols change nothing.
enum class Phase { kGammaJ, kGammaM, kTree, kRoster, kAssign, kDone, kSink };

// Structural expectations for the canonical 3-CNF tree grammar:
//   chain  ::= AND clause chain | clause          (right-fold)
//   clause ::= OR lit OR lit lit                  (preorder of Or(L,Or(L,L)))
//   lit    ::= VAR gamma(i) | NOT VAR gamma(i)
enum class Expect { kChainOp, kClauseOp, kOr2Op, kLitOp, kVarOp };

// A gamma-code sub-parser: zero count, then that many further value bits.
// Value caps are generous upper bounds implied by the input length (any
// string whose header claims more is provably massless), so `long` never
// overflows.
struct GammaScan {
  bool active = false;
  bool in_value = false;
  int zeros = 0;
  int remaining = 0;
  long value = 0;

  void start() { *this = GammaScan{}; active = true; }
  // Returns true when the code completed on this bit; sets *bad if the zero
  // run exceeds `max_zeros`.
  bool step(Bit b, int max_zeros, bool* bad) {
    if (!in_value) {
      if (b == 0) {
        if (++zeros > max_zeros) *bad = true;
        return false;
      }
      in_value = true;
      value = 1;
      remaining = zeros;
      return remaining == 0;
    }
    value = (value << 1) | b;
    return --remaining == 0;
  }
};

struct ScanState {
  Phase phase = Phase::kGammaJ;
  GammaScan gamma;
  long j = -1;   // declared variable count
  long m = -1;   // declared node count
  long nodes = 0;
  std::vector<Expect> expect;
  bool op_pending = false;
  Bit op_hi = 0;
  bool lit_negated = false;
  std::array<std::pair<int, bool>, 3> clause_lits{};
  int clause_len = 0;
  int lits_outstanding = 0;  // literals still owed before the clause closes
  long roster_left = 0;
  long assign_left = 0;
  int assign_var = 0;
  std::map<std::size_t, Rat> units;
  Rat fail = 0;
};

}  // namespace

// --- witness network --------------------------------------------------------

WitnessRnn::WitnessRnn(int n, int var_cap)
    : n_(n), var_cap_(var_cap), universe_(std::max(var_cap, 0)) {
  if (n < 0) throw ArgumentError("input length must be nonnegative");
  if (var_cap < 0) throw ArgumentError("variable cap must be nonnegative");
}

Rat WitnessRnn::evaluate(const BitString& x) const {
  return evaluate(x, nullptr);
}

Rat WitnessRnn::evaluate(
    const BitString& x,
    const std::function<void(const WitnessTrace&)>& observe) const {
  if (static_cast<int>(x.size()) != n_)
    throw ArgumentError("witness input length must equal n");

  ScanState st;
  st.gamma.start();  // the first header gamma code begins at bit 0
  const Rat one(1);
  const Rat clear_weight(std::max(n_, 1));
  auto ramp = [](const Rat& v) { return v > 0 ? v : Rat(0); };
  auto sink = [&st, &ramp, &one]() {
    st.fail = ramp(st.fail + one);            // sticky: stays exactly 1
    st.fail = st.fail - ramp(st.fail - one);  // saturate repeated failures
    st.phase = Phase::kSink;
  };
  // Sets the unit for the completed clause through the saturating ramp pair,
  // so a duplicated clause leaves the unit at exactly 1.
  auto set_unit = [&](std::size_t idx) {
    Rat& h = st.units[idx];
    Rat u = ramp(h + one);
    h = u - ramp(u - one);
  };
  auto begin_assignment = [&st]() {
    if (st.j == 0) {
      st.phase = Phase::kDone;
    } else {
      st.assign_left = st.j;
      st.assign_var = 1;
      st.phase = Phase::kAssign;
    }
  };
  // Entered once header + tree have been consumed: `consumed` is the number
  // of bits read so far, i.e. the length of the would-be encoding prefix.
  auto after_tree = [&st, &begin_assignment](std::size_t consumed) {
    if (static_cast<long>(consumed) < st.j) {
      st.roster_left = st.j;
      st.phase = Phase::kRoster;
    } else {
      begin_assignment();
    }
  };
  // A literal's variable index just finished decoding.
  auto literal_done = [&](long var) {
    if (var > st.j || st.clause_len >= 3) {
      sink();
      return;
    }
    st.clause_lits[static_cast<std::size_t>(st.clause_len++)] = {
        static_cast<int>(var), st.lit_negated};
    st.lit_negated = false;
    --st.lits_outstanding;
    if (st.lits_outstanding == 0) {
      const auto& cl = st.clause_lits;
      if (cl[0].first == cl[1].first || cl[0].first == cl[2].first ||
          cl[1].first == cl[2].first) {
        sink();
        return;
      }
      set_unit(universe_.index_of(cl[0].first, cl[0].second, cl[1].first,
                                  cl[1].second, cl[2].first, cl[2].second));
      st.clause_len = 0;
    }
  };

  // Zero runs longer than this bound declare gamma values larger than n + 1,
  // which no member of length n can use: variable and node counts are capped
  // at n/2 (roster padding and the two-bit opcodes respectively), and
  // variable indices never exceed the variable count.  Such strings are
  // provably massless, so the scanner may fail them outright; the bound also
  // keeps the accumulated value comfortably inside a `long`.
  const int max_zeros =
      std::bit_width(static_cast<unsigned long>(n_) + 2);

  for (std::size_t pos = 0; pos < x.size(); ++pos) {
    Bit b = x[pos];
    std::size_t consumed = pos + 1;
    switch (st.phase) {
      case Phase::kGammaJ:
      case Phase::kGammaM: {
        bool bad = false;
        if (st.gamma.step(b, max_zeros, &bad)) {
          long v = st.gamma.value - 1;  // headers store value + 1
          st.gamma = GammaScan{};
          if (st.phase == Phase::kGammaJ) {
            st.j = v;
            if (2 * st.j > n_) {
              sink();  // members of length n have at most n/2 variables
            } else if (st.j > var_cap_) {
              // The string could be a member, but its clause units are not
              // allocated: refusing beats silently reporting zero mass.
              throw CapacityError(
                  "decoded variable count exceeds the witness capacity");
            } else {
              st.phase = Phase::kGammaM;
              st.gamma.start();
            }
          } else {
            st.m = v;
            if (2 * st.m > n_) {
              sink();  // each tree node costs at least two bits
            } else if (st.m == 0) {
              after_tree(consumed);
            } else {
              st.expect.push_back(Expect::kChainOp);
              st.phase = Phase::kTree;
            }
          }
        } else if (bad) {
          sink();
        }
        break;
      }
      case Phase::kTree: {
        if (st.gamma.active) {
          bool bad = false;
          if (st.gamma.step(b, max_zeros, &bad)) {
            long v = st.gamma.value;  // variable indices are stored directly
            st.gamma = GammaScan{};
            literal_done(v);
          } else if (bad) {
            sink();
            break;
          }
        } else if (!st.op_pending) {
          st.op_pending = true;
          st.op_hi = b;
          break;
        } else {
          st.op_pending = false;
          int op = (st.op_hi << 1) | b;  // 00=AND 01=OR 10=NOT 11=VAR
          if (st.expect.empty()) {
            sink();
            break;
          }
          Expect e = st.expect.back();
          st.expect.pop_back();
          ++st.nodes;
          switch (e) {
            case Expect::kChainOp:
              if (op == 0) {  // AND: one clause, then the rest of the chain
                st.expect.push_back(Expect::kChainOp);
                st.expect.push_back(Expect::kClauseOp);
              } else if (op == 1) {  // OR: the final clause's outer node
                st.expect.push_back(Expect::kLitOp);
                st.expect.push_back(Expect::kLitOp);
                st.expect.push_back(Expect::kOr2Op);
                st.expect.push_back(Expect::kLitOp);
                st.lits_outstanding = 3;
              } else {
                sink();
              }
              break;
            case Expect::kClauseOp:
              if (op == 1) {
                st.expect.push_back(Expect::kLitOp);
                st.expect.push_back(Expect::kLitOp);
                st.expect.push_back(Expect::kOr2Op);
                st.expect.push_back(Expect::kLitOp);
                st.lits_outstanding = 3;
              } else {
                sink();
              }
              break;
            case Expect::kOr2Op:
              if (op != 1) sink();
              break;
            case Expect::kLitOp:
              if (op == 3) {  // VAR: variable index follows
                st.gamma.start();
              } else if (op == 2) {  // NOT: must wrap a VAR
                st.lit_negated = true;
                st.expect.push_back(Expect::kVarOp);
              } else {
                sink();
              }
              break;
            case Expect::kVarOp:
              if (op == 3) {
                st.gamma.start();
              } else {
                sink();
              }
              break;
          }
        }
        if (st.phase == Phase::kTree && st.expect.empty() &&
            !st.gamma.active && !st.op_pending) {
          if (st.nodes == st.m) {
            after_tree(consumed);
          } else {
            sink();
          }
        }
        break;
      }
      case Phase::kRoster:
        if (b != 1) {
          sink();
        } else if (--st.roster_left == 0) {
          begin_assignment();
        }
        break;
      case Phase::kAssign: {
        // Clear every live unit whose clause gains a satisfied literal: a
        // positive literal under bit 1, a negative one under bit 0.
        bool assigned_true = (b == 1);
        for (auto it = st.units.begin(); it != st.units.end();) {
          LitClause cl = universe_.clause(it->first);
          bool hit = (cl.v1 == st.assign_var && cl.neg1 != assigned_true) ||
                     (cl.v2 == st.assign_var && cl.neg2 != assigned_true) ||
                     (cl.v3 == st.assign_var && cl.neg3 != assigned_true);
          if (hit) {
            Rat cleared = ramp(it->second - clear_weight);
            if (cleared == 0) {
              it = st.units.erase(it);
              continue;
            }
            it->second = cleared;  // unreachable for digital units
          }
          ++it;
        }
        ++st.assign_var;
        if (--st.assign_left == 0) st.phase = Phase::kDone;
        break;
      }
      case Phase::kDone:
        sink();  // trailing bits beyond the assignment
        break;
      case Phase::kSink:
        break;
    }
    if (observe) observe(WitnessTrace{st.units, st.fail, consumed});
  }

  Rat done(st.phase == Phase::kDone ? 1 : 0);
  Rat live(0);
  for (const auto& [idx, h] : st.units) live += h;
  Rat gate = ramp(done - live - st.fail);
  return gate * third_pow(static_cast<unsigned long>(n_) + 1);
}

// --- serialization ----------------------------------------------------------

std::vector<std::uint8_t> WitnessRnn::serialize() const {
  std::vector<std::uint8_t> out;
  unsigned long v = static_cast<unsigned long>(n_);
  do {
    std::uint8_t byte = static_cast<std::uint8_t>(v & 0x7f);
    v >>= 7;
    if (v != 0) byte |= 0x80;
    out.push_back(byte);
  } while (v != 0);
  return out;
}

WitnessRnn WitnessRnn::deserialize(const std::vector<std::uint8_t>& bytes,
                                   int var_cap) {
  unsigned long v = 0;
  int shift = 0;
  std::size_t i = 0;
  for (; i < bytes.size(); ++i) {
    if (shift >= 28) throw ArgumentError("witness description too long");
    v |= static_cast<unsigned long>(bytes[i] & 0x7f) << shift;
    shift += 7;
    if ((bytes[i] & 0x80) == 0) {
      ++i;
      break;
    }
  }
  if (i == 0 || i != bytes.size() || (bytes.back() & 0x80) != 0)
    throw ArgumentError("malformed witness description");
  return WitnessRnn(static_cast<int>(v), var_cap);
}

}  // namespace satlang
