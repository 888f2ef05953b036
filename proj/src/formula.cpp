// formula.cpp -- expression trees, exhaustive counting oracles, the
// AddOne / AddOneAndBlowUp constructions, and the prefix-free codec.

#include "satlang/formula.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <sstream>
#include <utility>

namespace satlang {

namespace {

// Codec capacity bounds.  Inputs declaring sizes beyond these are rejected
// as invalid rather than entertained; everything at desk scale is far below.
constexpr unsigned long long kMaxVarCount = 1ull << 20;
constexpr unsigned long long kMaxNodeCount = 1ull << 22;
constexpr int kMaxGammaZeros = 40;

}  // namespace

// --- Expr ----------------------------------------------------------------

int Expr::copy_subtree(const Expr& src, int node) {
  ExprNode out = src.nodes_[node];
  if (out.left >= 0) out.left = copy_subtree(src, out.left);
  if (out.right >= 0) out.right = copy_subtree(src, out.right);
  nodes_.push_back(out);
  return static_cast<int>(nodes_.size()) - 1;
}

Expr Expr::from_arena(std::vector<ExprNode> nodes, int root) {
  Expr e;
  e.nodes_ = std::move(nodes);
  e.root_ = root;
  return e;
}

Expr Expr::var(int i) {
  if (i < 1) throw ArgumentError("variable indices are 1-based");
  Expr e;
  e.nodes_.push_back(ExprNode{NodeKind::Var, i, -1, -1});
  e.root_ = 0;
  return e;
}

Expr Expr::neg(const Expr& x) {
  if (x.is_true()) throw ArgumentError("cannot negate the constant true");
  Expr e;
  int child = e.copy_subtree(x, x.root_);
  e.nodes_.push_back(ExprNode{NodeKind::Not, 0, child, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::conj(const Expr& a, const Expr& b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  Expr e;
  int l = e.copy_subtree(a, a.root_);
  int r = e.copy_subtree(b, b.root_);
  e.nodes_.push_back(ExprNode{NodeKind::And, 0, l, r});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::disj(const Expr& a, const Expr& b) {
  // OR with the constant true collapses to true; neither construction in
  // this codebase produces that case, but the semantics must stay honest.
  if (a.is_true() || b.is_true()) return Expr::truth();
  Expr e;
  int l = e.copy_subtree(a, a.root_);
  int r = e.copy_subtree(b, b.root_);
  e.nodes_.push_back(ExprNode{NodeKind::Or, 0, l, r});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::conj_all(const std::vector<Expr>& parts) {
  if (parts.empty()) return Expr::truth();
  Expr acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = conj(parts[i], acc);
  return acc;
}

Expr Expr::disj_all(const std::vector<Expr>& parts) {
  if (parts.empty()) throw ArgumentError("empty disjunction has no representation");
  Expr acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = disj(parts[i], acc);
  return acc;
}

int Expr::max_var() const {
  int m = 0;
  for (const ExprNode& nd : nodes_)
    if (nd.kind == NodeKind::Var) m = std::max(m, nd.var);
  return m;
}

bool Expr::operator==(const Expr& other) const {
  if (is_true() || other.is_true()) return is_true() == other.is_true();
  std::vector<std::pair<int, int>> stack{{root_, other.root_}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const ExprNode& na = nodes_[a];
    const ExprNode& nb = other.nodes_[b];
    if (na.kind != nb.kind || na.var != nb.var) return false;
    if (na.left >= 0) stack.emplace_back(na.left, nb.left);
    if (na.right >= 0) stack.emplace_back(na.right, nb.right);
  }
  return true;
}

// --- Formula ---------------------------------------------------------------

Formula::Formula(int var_count, Expr body)
    : var_count_(var_count), body_(std::move(body)) {
  if (var_count_ < 0) throw ArgumentError("variable count must be nonnegative");
  if (body_.max_var() > var_count_)
    throw ArgumentError("formula body mentions a variable beyond its count");
}

bool Formula::mentions_all_vars() const {
  std::vector<char> seen(static_cast<std::size_t>(var_count_) + 1, 0);
  for (const ExprNode& nd : body_.nodes())
    if (nd.kind == NodeKind::Var) seen[nd.var] = 1;
  for (int i = 1; i <= var_count_; ++i)
    if (!seen[i]) return false;
  return true;
}

std::string Formula::to_string() const {
  std::ostringstream os;
  os << "[" << var_count_ << "] ";
  if (body_.is_true()) {
    os << "T";
    return os.str();
  }
  const auto& nodes = body_.nodes();
  auto render = [&](auto&& self, int idx) -> void {
    const ExprNode& nd = nodes[idx];
    switch (nd.kind) {
      case NodeKind::Var:
        os << "A" << nd.var;
        break;
      case NodeKind::Not:
        os << "!";
        self(self, nd.left);
        break;
      case NodeKind::And:
        os << "(";
        self(self, nd.left);
        os << " & ";
        self(self, nd.right);
        os << ")";
        break;
      case NodeKind::Or:
        os << "(";
        self(self, nd.left);
        os << " | ";
        self(self, nd.right);
        os << ")";
        break;
    }
  };
  render(render, body_.root());
  return os.str();
}

// --- satisfaction & counting ------------------------------------------------

bool evaluate(const Formula& f, const BitString& a) {
  if (static_cast<int>(a.size()) != f.var_count())
    throw ArgumentError("assignment length must equal the variable count");
  const Expr& e = f.body();
  if (e.is_true()) return true;
  const auto& nodes = e.nodes();
  std::vector<char> val(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ExprNode& nd = nodes[i];
    switch (nd.kind) {
      case NodeKind::Var:
        val[i] = a[nd.var - 1];
        break;
      case NodeKind::Not:
        val[i] = !val[nd.left];
        break;
      case NodeKind::And:
        val[i] = val[nd.left] && val[nd.right];
        break;
      case NodeKind::Or:
        val[i] = val[nd.left] || val[nd.right];
        break;
    }
  }
  return val[e.root()] != 0;
}

namespace {

// Lane masks for the low six bits of an assignment id: kLaneMask[p] has bit
// l set iff bit p of l is set.
constexpr std::uint64_t kLaneMask[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

// Evaluates the body on the 64 assignments whose ids are block*64 .. +63.
// Assignment id encodes variable A_i as id bit (j - i), so ids ascend in
// lexicographic order of the assignment string a1..aj.
std::uint64_t eval_block(const Expr& e, int j, std::uint64_t block,
                         std::vector<std::uint64_t>& scratch) {
  if (e.is_true()) return ~0ull;
  const auto& nodes = e.nodes();
  scratch.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ExprNode& nd = nodes[i];
    switch (nd.kind) {
      case NodeKind::Var: {
        int p = j - nd.var;
        scratch[i] = p < 6 ? kLaneMask[p]
                           : ((block >> (p - 6)) & 1 ? ~0ull : 0ull);
        break;
      }
      case NodeKind::Not:
        scratch[i] = ~scratch[nd.left];
        break;
      case NodeKind::And:
        scratch[i] = scratch[nd.left] & scratch[nd.right];
        break;
      case NodeKind::Or:
        scratch[i] = scratch[nd.left] | scratch[nd.right];
        break;
    }
  }
  return scratch[e.root()];
}

std::uint64_t lane_range_mask(unsigned lo, unsigned hi) {
  std::uint64_t m = hi >= 64 ? ~0ull : (1ull << hi) - 1;
  if (lo > 0) m &= ~((1ull << lo) - 1);
  return m;
}

// Counts satisfying assignments with ids in [lo, hi).
unsigned long count_id_range(const Expr& body, int j, std::uint64_t lo,
                             std::uint64_t hi) {
  if (lo >= hi) return 0;
  std::vector<std::uint64_t> scratch;
  unsigned long total = 0;
  std::uint64_t b0 = lo >> 6, b1 = (hi - 1) >> 6;
  for (std::uint64_t b = b0; b <= b1; ++b) {
    std::uint64_t base = b << 6;
    unsigned l = lo > base ? static_cast<unsigned>(lo - base) : 0u;
    std::uint64_t span = hi - base;
    unsigned h = span > 64 ? 64u : static_cast<unsigned>(span);
    total += static_cast<unsigned>(
        std::popcount(eval_block(body, j, b, scratch) & lane_range_mask(l, h)));
  }
  return total;
}

void check_enumeration(int work_bits, int cap, const char* what) {
  if (cap < 0 || cap > 62) throw ArgumentError("enumeration cap out of range");
  if (work_bits > cap) {
    std::ostringstream os;
    os << what << " would enumerate 2^" << work_bits
       << " assignments (cap 2^" << cap << ")";
    throw CapacityError(os.str());
  }
}

BitString id_to_assignment(std::uint64_t id, int j) {
  BitString a(static_cast<std::size_t>(j));
  for (int t = 0; t < j; ++t) a[t] = static_cast<Bit>((id >> (j - 1 - t)) & 1);
  return a;
}

}  // namespace

Int count_satisfying(const Formula& f, int enumeration_cap) {
  int j = f.var_count();
  check_enumeration(j, enumeration_cap, "count_satisfying");
  return Int(count_id_range(f.body(), j, 0, 1ull << j));
}

std::optional<BitString> first_satisfier(const Formula& f, int enumeration_cap) {
  int j = f.var_count();
  check_enumeration(j, enumeration_cap, "first_satisfier");
  std::uint64_t hi = 1ull << j;
  std::vector<std::uint64_t> scratch;
  for (std::uint64_t b = 0; (b << 6) < hi; ++b) {
    std::uint64_t span = hi - (b << 6);
    unsigned h = span > 64 ? 64u : static_cast<unsigned>(span);
    std::uint64_t w = eval_block(f.body(), j, b, scratch) & lane_range_mask(0, h);
    if (w != 0) {
      int lane = std::countr_zero(w);
      return id_to_assignment((b << 6) | static_cast<unsigned>(lane), j);
    }
  }
  return std::nullopt;
}

std::vector<BitString> all_satisfiers(const Formula& f, int enumeration_cap) {
  int j = f.var_count();
  check_enumeration(j, enumeration_cap, "all_satisfiers");
  std::uint64_t hi = 1ull << j;
  std::vector<std::uint64_t> scratch;
  std::vector<BitString> out;
  for (std::uint64_t b = 0; (b << 6) < hi; ++b) {
    std::uint64_t span = hi - (b << 6);
    unsigned h = span > 64 ? 64u : static_cast<unsigned>(span);
    std::uint64_t w = eval_block(f.body(), j, b, scratch) & lane_range_mask(0, h);
    while (w != 0) {
      int lane = std::countr_zero(w);
      w &= w - 1;
      out.push_back(id_to_assignment((b << 6) | static_cast<unsigned>(lane), j));
    }
  }
  return out;
}

Int count_satisfying_extensions(const Formula& f, const BitString& r,
                                int enumeration_cap) {
  int j = f.var_count();
  if (static_cast<int>(r.size()) > j)
    throw ArgumentError("partial assignment longer than the variable count");
  int free_bits = j - static_cast<int>(r.size());
  check_enumeration(free_bits, enumeration_cap, "count_satisfying_extensions");
  std::uint64_t prefix = 0;
  for (Bit b : r) prefix = (prefix << 1) | b;
  std::uint64_t lo = prefix << free_bits;
  return Int(count_id_range(f.body(), j, lo, lo + (1ull << free_bits)));
}

// --- transformations --------------------------------------------------------

Formula shift(const Formula& f) {
  if (f.body().is_true()) return Formula(f.var_count() + 1, Expr::truth());
  std::vector<ExprNode> nodes = f.body().nodes();
  for (ExprNode& nd : nodes)
    if (nd.kind == NodeKind::Var) ++nd.var;
  return Formula(f.var_count() + 1,
                 Expr::from_arena(std::move(nodes), f.body().root()));
}

Formula add_one_and_blow_up(const Formula& f, int k) {
  if (k < 1) throw ArgumentError("blow-up size k must be at least 1");
  int j = f.var_count();
  std::vector<Expr> negs;
  negs.reserve(static_cast<std::size_t>(j) + k);
  for (int i = 1; i <= j + k; ++i) negs.push_back(Expr::neg(Expr::var(i)));
  Expr branch_zero = Expr::conj_all(negs);
  Expr branch_one = Expr::conj(Expr::var(1), shift(f).body());
  return Formula(j + k, Expr::disj(branch_zero, branch_one));
}

Formula add_one(const Formula& f) { return add_one_and_blow_up(f, 1); }

int choose_k_sq(const Rat& lambda_sq) {
  if (lambda_sq <= 0) throw ArgumentError("lambda^2 must be positive");
  Int power = 1;  // 2^{k-1}
  for (int k = 1; k <= 128; ++k) {
    Int threshold = power + 1;
    if (Rat(threshold) > lambda_sq) return k;
    power <<= 1;
  }
  throw ArgumentError("lambda is too large for a sensible blow-up");
}

int choose_k(const Rat& lambda) { return choose_k_sq(lambda * lambda); }

// --- codec --------------------------------------------------------------

namespace {

void append_gamma(BitString& out, unsigned long long v) {
  int width = std::bit_width(v);  // v >= 1 always
  for (int i = 0; i < width - 1; ++i) out.push_back(0);
  for (int i = width - 1; i >= 0; --i)
    out.push_back(static_cast<Bit>((v >> i) & 1));
}

struct Reader {
  const BitString& x;
  std::size_t pos = 0;
  bool eof() const { return pos >= x.size(); }
};

void set_err(DecodeError* err, DecodeFailure kind, std::size_t pos,
             std::string msg) {
  if (err) *err = DecodeError{kind, pos, std::move(msg)};
}

std::optional<unsigned long long> read_gamma(Reader& r, DecodeError* err) {
  int zeros = 0;
  while (true) {
    if (r.eof()) {
      set_err(err, DecodeFailure::kNeedMoreBits, r.pos,
              "input ended inside a gamma code");
      return std::nullopt;
    }
    if (r.x[r.pos++] == 1) break;
    if (++zeros > kMaxGammaZeros) {
      set_err(err, DecodeFailure::kInvalid, r.pos,
              "gamma code exceeds the codec size bound");
      return std::nullopt;
    }
  }
  unsigned long long v = 1;
  for (int i = 0; i < zeros; ++i) {
    if (r.eof()) {
      set_err(err, DecodeFailure::kNeedMoreBits, r.pos,
              "input ended inside a gamma code");
      return std::nullopt;
    }
    v = (v << 1) | r.x[r.pos++];
  }
  return v;
}

}  // namespace

BitString enc(const Formula& f) {
  BitString out;
  append_gamma(out, static_cast<unsigned long long>(f.var_count()) + 1);
  BitString tree;
  unsigned long long node_count = 0;
  const Expr& e = f.body();
  if (!e.is_true()) {
    std::vector<int> stack{e.root()};
    while (!stack.empty()) {
      int idx = stack.back();
      stack.pop_back();
      const ExprNode& nd = e.nodes()[idx];
      ++node_count;
      switch (nd.kind) {
        case NodeKind::And:
          tree.push_back(0);
          tree.push_back(0);
          stack.push_back(nd.right);
          stack.push_back(nd.left);
          break;
        case NodeKind::Or:
          tree.push_back(0);
          tree.push_back(1);
          stack.push_back(nd.right);
          stack.push_back(nd.left);
          break;
        case NodeKind::Not:
          tree.push_back(1);
          tree.push_back(0);
          stack.push_back(nd.left);
          break;
        case NodeKind::Var:
          tree.push_back(1);
          tree.push_back(1);
          append_gamma(tree, static_cast<unsigned long long>(nd.var));
          break;
      }
    }
  }
  append_gamma(out, node_count + 1);
  out.insert(out.end(), tree.begin(), tree.end());
  // Roster padding: guarantee |enc(f)| >= var_count so that the encoding of
  // a formula is never shorter than its assignment suffix.
  if (out.size() < static_cast<std::size_t>(f.var_count()))
    out.insert(out.end(), static_cast<std::size_t>(f.var_count()), Bit{1});
  return out;
}

std::optional<DecodeResult> dec(const BitString& x, DecodeError* err) {
  Reader r{x};
  auto gj = read_gamma(r, err);
  if (!gj) return std::nullopt;
  if (*gj - 1 > kMaxVarCount) {
    set_err(err, DecodeFailure::kInvalid, r.pos,
            "variable count exceeds codec capacity");
    return std::nullopt;
  }
  int j = static_cast<int>(*gj - 1);

  auto gm = read_gamma(r, err);
  if (!gm) return std::nullopt;
  if (*gm - 1 > kMaxNodeCount) {
    set_err(err, DecodeFailure::kInvalid, r.pos,
            "node count exceeds codec capacity");
    return std::nullopt;
  }
  std::size_t m = static_cast<std::size_t>(*gm - 1);

  Expr body;
  if (m > 0) {
    struct Slot {
      int parent;
      bool right;
    };
    std::vector<ExprNode> pre;
    std::vector<Slot> slots{{-1, false}};
    while (!slots.empty()) {
      Slot slot = slots.back();
      slots.pop_back();
      if (pre.size() >= m) {
        set_err(err, DecodeFailure::kInvalid, r.pos,
                "expression tree needs more nodes than declared");
        return std::nullopt;
      }
      if (r.pos + 2 > x.size()) {
        set_err(err, DecodeFailure::kNeedMoreBits, x.size(),
                "input ended inside an opcode");
        return std::nullopt;
      }
      int op = (x[r.pos] << 1) | x[r.pos + 1];
      r.pos += 2;
      int idx = static_cast<int>(pre.size());
      ExprNode nd{NodeKind::And, 0, -1, -1};
      switch (op) {
        case 0:
          nd.kind = NodeKind::And;
          break;
        case 1:
          nd.kind = NodeKind::Or;
          break;
        case 2:
          nd.kind = NodeKind::Not;
          break;
        default:
          nd.kind = NodeKind::Var;
          break;
      }
      pre.push_back(nd);
      if (slot.parent >= 0) {
        if (slot.right)
          pre[slot.parent].right = idx;
        else
          pre[slot.parent].left = idx;
      }
      switch (pre[idx].kind) {
        case NodeKind::And:
        case NodeKind::Or:
          slots.push_back({idx, true});
          slots.push_back({idx, false});
          break;
        case NodeKind::Not:
          slots.push_back({idx, false});
          break;
        case NodeKind::Var: {
          auto gi = read_gamma(r, err);
          if (!gi) return std::nullopt;
          if (*gi > static_cast<unsigned long long>(j)) {
            set_err(err, DecodeFailure::kInvalid, r.pos,
                    "variable index exceeds the declared count");
            return std::nullopt;
          }
          pre[idx].var = static_cast<int>(*gi);
          break;
        }
      }
    }
    if (pre.size() != m) {
      set_err(err, DecodeFailure::kInvalid, r.pos,
              "declared node count exceeds the expression tree");
      return std::nullopt;
    }
    // The decode above is in preorder (parents before children); Expr wants
    // children before parents.  Reversing index order achieves exactly that.
    int last = static_cast<int>(m) - 1;
    std::vector<ExprNode> arena(m);
    for (std::size_t i = 0; i < m; ++i) {
      ExprNode nd = pre[i];
      if (nd.left >= 0) nd.left = last - nd.left;
      if (nd.right >= 0) nd.right = last - nd.right;
      arena[m - 1 - i] = nd;
    }
    body = Expr::from_arena(std::move(arena), last);
  }

  if (r.pos < static_cast<std::size_t>(j)) {
    for (int i = 0; i < j; ++i) {
      if (r.eof()) {
        set_err(err, DecodeFailure::kNeedMoreBits, r.pos,
                "input ended inside roster padding");
        return std::nullopt;
      }
      if (r.x[r.pos++] != 1) {
        set_err(err, DecodeFailure::kInvalid, r.pos,
                "roster padding must be all ones");
        return std::nullopt;
      }
    }
  }
  return DecodeResult{Formula(j, std::move(body)), r.pos};
}

// --- random formulas ---------------------------------------------------

Formula random_formula(Rng& rng, int max_vars, int extra_leaves) {
  if (max_vars < 1) throw ArgumentError("random_formula needs max_vars >= 1");
  if (extra_leaves < 0) throw ArgumentError("extra_leaves must be nonnegative");
  int j = 1 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(max_vars)));
  auto literal = [&](int i) {
    Expr v = Expr::var(i);
    return rand_bit(rng) ? Expr::neg(v) : v;
  };
  std::vector<Expr> pool;
  for (int i = 1; i <= j; ++i) pool.push_back(literal(i));
  for (int e = 0; e < extra_leaves; ++e)
    pool.push_back(literal(1 + static_cast<int>(
        rand_below(rng, static_cast<std::uint64_t>(j)))));
  while (pool.size() > 1) {
    std::size_t a = rand_below(rng, pool.size());
    Expr ea = pool[a];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(a));
    std::size_t b = rand_below(rng, pool.size());
    Expr eb = pool[b];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(b));
    Expr combined = rand_bit(rng) ? Expr::conj(ea, eb) : Expr::disj(ea, eb);
    if (rand_below(rng, 8) == 0) combined = Expr::neg(combined);
    std::size_t at = rand_below(rng, pool.size() + 1);
    pool.insert(pool.begin() + static_cast<std::ptrdiff_t>(at), combined);
  }
  return Formula(j, pool.front());
}

}  // namespace satlang
