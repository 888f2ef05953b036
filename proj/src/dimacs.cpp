// dimacs.cpp -- modified-DIMACS text codec and clause-form helpers.

#include "satlang/dimacs.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace satlang {

namespace {

struct Token {
  enum Kind { kMinus, kHash, kNumber } kind;
  int value = 0;          // kNumber only
  std::size_t position;   // character offset of the token start
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-') {
      out.push_back({Token::kMinus, 0, i});
      ++i;
      continue;
    }
    if (c == '#') {
      out.push_back({Token::kHash, 0, i});
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      long v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        v = v * 10 + (text[i] - '0');
        if (v > 1'000'000) throw ParseError("variable index out of range", start);
        ++i;
      }
      out.push_back({Token::kNumber, static_cast<int>(v), start});
      continue;
    }
    throw ParseError("unexpected character in formula text", i);
  }
  return out;
}

}  // namespace

Cnf3 dimacs_decode(const std::string& text, DimacsMode mode) {
  std::vector<Token> tokens = tokenize(text);
  Cnf3 out;
  if (tokens.empty()) return out;  // zero clauses, constant true

  std::vector<int> clause;
  std::size_t clause_pos = tokens.front().position;
  auto finish_clause = [&](std::size_t at) {
    if (clause.empty()) throw ParseError("empty clause", at);
    std::vector<int> kept;
    for (std::size_t idx = 0; idx < clause.size(); ++idx) {
      int lit = clause[idx];
      bool same = false, opposite = false;
      for (std::size_t prev = 0; prev < idx; ++prev) {
        if (clause[prev] == lit) same = true;
        if (clause[prev] == -lit) opposite = true;
      }
      if ((same || opposite) && mode == DimacsMode::kStrict)
        throw ParseError("duplicate variable in clause", clause_pos);
      if (!same) kept.push_back(lit);  // tolerant: drop repeats, keep ~pairs
    }
    out.clauses.push_back(std::move(kept));
    clause.clear();
  };

  bool pending_minus = false;
  std::size_t minus_pos = 0;
  for (const Token& t : tokens) {
    switch (t.kind) {
      case Token::kMinus:
        if (pending_minus) throw ParseError("doubled negation sign", t.position);
        pending_minus = true;
        minus_pos = t.position;
        break;
      case Token::kNumber: {
        if (t.value == 0) throw ParseError("zero variable index", t.position);
        if (clause.empty()) clause_pos = pending_minus ? minus_pos : t.position;
        if (clause.size() >= 3)
          throw ParseError("clause has more than 3 literals", t.position);
        clause.push_back(pending_minus ? -t.value : t.value);
        out.var_count = std::max(out.var_count, t.value);
        pending_minus = false;
        break;
      }
      case Token::kHash:
        if (pending_minus) throw ParseError("dangling negation sign", minus_pos);
        finish_clause(t.position);
        break;
    }
  }
  if (pending_minus) throw ParseError("dangling negation sign", minus_pos);
  finish_clause(text.size());
  return out;
}

std::string dimacs_encode(const Cnf3& f) {
  std::ostringstream os;
  for (std::size_t c = 0; c < f.clauses.size(); ++c) {
    if (c > 0) os << " # ";
    const auto& clause = f.clauses[c];
    for (std::size_t l = 0; l < clause.size(); ++l) {
      if (l > 0) os << " ";
      int lit = clause[l];
      if (lit < 0)
        os << "- " << -lit;
      else
        os << lit;
    }
  }
  return os.str();
}

Formula cnf3_to_formula(const Cnf3& f) {
  std::vector<Expr> clause_exprs;
  clause_exprs.reserve(f.clauses.size());
  for (const auto& clause : f.clauses) {
    std::vector<Expr> lits;
    lits.reserve(clause.size());
    for (int lit : clause) {
      Expr v = Expr::var(std::abs(lit));
      lits.push_back(lit < 0 ? Expr::neg(v) : v);
    }
    clause_exprs.push_back(Expr::disj_all(lits));
  }
  return Formula(f.var_count, Expr::conj_all(clause_exprs));
}

namespace {

// Reads a literal subtree rooted at `idx`: Var(i) or Not(Var(i)).
bool read_literal(const std::vector<ExprNode>& nodes, int idx, int* lit) {
  const ExprNode& nd = nodes[idx];
  if (nd.kind == NodeKind::Var) {
    *lit = nd.var;
    return true;
  }
  if (nd.kind == NodeKind::Not && nodes[nd.left].kind == NodeKind::Var) {
    *lit = -nodes[nd.left].var;
    return true;
  }
  return false;
}

// Reads a clause subtree: Or(L1, Or(L2, L3)) over three distinct variables.
bool read_clause(const std::vector<ExprNode>& nodes, int idx,
                 std::vector<int>* clause) {
  const ExprNode& outer = nodes[idx];
  if (outer.kind != NodeKind::Or) return false;
  const ExprNode& inner = nodes[outer.right];
  if (inner.kind != NodeKind::Or) return false;
  int l1, l2, l3;
  if (!read_literal(nodes, outer.left, &l1)) return false;
  if (!read_literal(nodes, inner.left, &l2)) return false;
  if (!read_literal(nodes, inner.right, &l3)) return false;
  int v1 = std::abs(l1), v2 = std::abs(l2), v3 = std::abs(l3);
  if (v1 == v2 || v1 == v3 || v2 == v3) return false;
  *clause = {l1, l2, l3};
  return true;
}

}  // namespace

bool formula_to_cnf3(const Formula& f, Cnf3* out) {
  Cnf3 result;
  result.var_count = f.var_count();
  const Expr& body = f.body();
  if (!body.is_true()) {
    const auto& nodes = body.nodes();
    int cur = body.root();
    while (nodes[cur].kind == NodeKind::And) {
      std::vector<int> clause;
      if (!read_clause(nodes, nodes[cur].left, &clause)) return false;
      result.clauses.push_back(std::move(clause));
      cur = nodes[cur].right;
    }
    std::vector<int> clause;
    if (!read_clause(nodes, cur, &clause)) return false;
    result.clauses.push_back(std::move(clause));
  }
  if (out) *out = std::move(result);
  return true;
}

bool cnf3_evaluate(const Cnf3& f, const BitString& a) {
  if (static_cast<int>(a.size()) != f.var_count)
    throw ArgumentError("assignment length must equal the variable count");
  for (const auto& clause : f.clauses) {
    bool sat = false;
    for (int lit : clause) {
      Bit v = a[static_cast<std::size_t>(std::abs(lit)) - 1];
      if ((lit > 0 && v == 1) || (lit < 0 && v == 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace satlang
