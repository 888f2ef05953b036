// seqmodel.cpp -- autoregressive models, SGD training, and evaluation.

#include "satlang/seqmodel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "satlang/dimacs.hpp"
#include "satlang/formula.hpp"

namespace satlang {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_tokens(const TokenString& seq, int vocab, const char* where) {
  for (int t : seq) {
    if (t < 0 || t >= vocab) {
      throw ArgumentError(std::string(where) + ": token " + std::to_string(t) +
                          " outside vocabulary of size " +
                          std::to_string(vocab));
    }
  }
}

// Stable softmax; writes probabilities into probs (size n) and returns
// log(sum exp logits), so that log p_i = logits[i] - returned value.
double softmax_into(const double* logits, int n, double* probs) {
  double mx = logits[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    probs[i] = std::exp(logits[i] - mx);
    sum += probs[i];
  }
  for (int i = 0; i < n; ++i) probs[i] /= sum;
  return mx + std::log(sum);
}

}  // namespace

// ---------------------------------------------------------------------------
// Sequences
// ---------------------------------------------------------------------------

TokenString example_sequence(const Example& e) {
  const BitString code = enc(cnf3_to_formula(e.formula));
  TokenString seq;
  seq.reserve(code.size() + e.assignment.size() + 1);
  for (Bit b : code) seq.push_back(static_cast<int>(b));
  for (Bit b : e.assignment) seq.push_back(static_cast<int>(b));
  seq.push_back(end_token(kSatVocab));
  return seq;
}

std::size_t assignment_position(const Example& e) {
  return enc(cnf3_to_formula(e.formula)).size();
}

// ---------------------------------------------------------------------------
// Base model
// ---------------------------------------------------------------------------

ArModel::ArModel(int vocab) : vocab_(vocab) {
  if (vocab < 2) {
    throw ArgumentError(
        "vocabulary needs at least one symbol plus the end token");
  }
}

void ArModel::fit(const std::vector<TokenString>&) {}

double ArModel::accumulate_grad(const TokenString&, std::vector<double>*,
                                std::size_t) const {
  throw ArgumentError("model kind '" + kind() + "' has no trainable parameters");
}

// ---------------------------------------------------------------------------
// Trie
// ---------------------------------------------------------------------------

TrieArModel::TrieArModel(int vocab) : ArModel(vocab) {
  nodes_.push_back(
      Node{0, std::vector<int>(static_cast<std::size_t>(vocab), -1)});
}

void TrieArModel::fit(const std::vector<TokenString>& corpus) {
  if (corpus.empty()) {
    throw ArgumentError("cannot fit a trie on an empty corpus");
  }
  const int v = vocab();
  const int end = end_token(v);
  std::vector<Node> nodes;
  nodes.push_back(Node{0, std::vector<int>(static_cast<std::size_t>(v), -1)});
  for (const TokenString& seq : corpus) {
    check_tokens(seq, v, "TrieArModel::fit");
    if (seq.empty() || seq.back() != end) {
      throw ArgumentError("trie corpus sequences must finish with the end token");
    }
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      if (seq[i] == end) {
        throw ArgumentError(
            "trie corpus sequences may hold the end token only in the final "
            "position");
      }
    }
    std::size_t cur = 0;
    nodes[cur].count += 1;
    for (int tok : seq) {
      int child = nodes[cur].child[static_cast<std::size_t>(tok)];
      if (child < 0) {
        child = static_cast<int>(nodes.size());
        nodes[cur].child[static_cast<std::size_t>(tok)] = child;
        nodes.push_back(
            Node{0, std::vector<int>(static_cast<std::size_t>(v), -1)});
      }
      cur = static_cast<std::size_t>(child);
      nodes[cur].count += 1;
    }
  }
  nodes_ = std::move(nodes);
}

void TrieArModel::set_nodes(std::vector<Node> nodes) {
  if (nodes.empty()) throw ArgumentError("trie needs at least a root node");
  const std::size_t v = static_cast<std::size_t>(vocab());
  for (const Node& n : nodes) {
    if (n.count < 0) throw ArgumentError("trie node with negative count");
    if (n.child.size() != v) {
      throw ArgumentError("trie node with wrong fan-out for the vocabulary");
    }
    for (int c : n.child) {
      if (c < -1 || c >= static_cast<int>(nodes.size())) {
        throw ArgumentError("trie child index out of range");
      }
    }
  }
  nodes_ = std::move(nodes);
}

namespace {

class TrieScorer final : public ArScorer {
 public:
  explicit TrieScorer(const TrieArModel& m) : m_(m), node_(0), dead_(false) {}

  std::vector<double> dist() const override {
    const int v = m_.vocab();
    std::vector<double> d(static_cast<std::size_t>(v), 0.0);
    const auto& nodes = m_.nodes();
    const TrieArModel::Node& cur = nodes[node_];
    bool any = false;
    if (!dead_ && cur.count > 0) {
      for (int t = 0; t < v; ++t) {
        const int c = cur.child[static_cast<std::size_t>(t)];
        if (c >= 0) {
          d[static_cast<std::size_t>(t)] =
              static_cast<double>(nodes[static_cast<std::size_t>(c)].count) /
              static_cast<double>(cur.count);
          any = true;
        }
      }
    }
    // Dead or observation-free states (including the state right after an
    // end token) fall back to uniform so the distribution stays normalized.
    if (!any) std::fill(d.begin(), d.end(), 1.0 / v);
    return d;
  }

  void advance(int tok) override {
    if (tok < 0 || tok >= m_.vocab()) {
      throw ArgumentError("token outside vocabulary");
    }
    if (dead_) return;
    const int c = m_.nodes()[node_].child[static_cast<std::size_t>(tok)];
    if (c < 0) {
      dead_ = true;
    } else {
      node_ = static_cast<std::size_t>(c);
    }
  }

 private:
  const TrieArModel& m_;
  std::size_t node_;
  bool dead_;
};

}  // namespace

std::unique_ptr<ArScorer> TrieArModel::make_scorer() const {
  return std::make_unique<TrieScorer>(*this);
}

// ---------------------------------------------------------------------------
// N-gram
// ---------------------------------------------------------------------------

NgramModel::NgramModel(int order, int vocab) : ArModel(vocab), order_(order) {
  if (order < 0) throw ArgumentError("n-gram order must be nonnegative");
  if (order > kMaxOrder) {
    throw CapacityError("n-gram order beyond the dense-table cap");
  }
  std::size_t rows = 1;
  for (int i = 0; i < order; ++i) rows *= static_cast<std::size_t>(vocab + 1);
  rows_ = rows;
  params_.assign(rows_ * static_cast<std::size_t>(vocab), 0.0);
}

namespace {

class NgramScorer final : public ArScorer {
 public:
  explicit NgramScorer(const NgramModel& m)
      : m_(m),
        ctx_(static_cast<std::size_t>(m.order()),
             static_cast<std::size_t>(m.vocab())) {}

  std::vector<double> dist() const override {
    const int v = m_.vocab();
    std::vector<double> d(static_cast<std::size_t>(v));
    softmax_into(m_.params().data() + row() * static_cast<std::size_t>(v), v,
                 d.data());
    return d;
  }

  void advance(int tok) override {
    if (tok < 0 || tok >= m_.vocab()) {
      throw ArgumentError("token outside vocabulary");
    }
    if (ctx_.empty()) return;
    for (std::size_t i = ctx_.size(); i-- > 1;) ctx_[i] = ctx_[i - 1];
    ctx_[0] = static_cast<std::size_t>(tok);
  }

 private:
  std::size_t row() const {
    std::size_t r = 0;
    const std::size_t base = static_cast<std::size_t>(m_.vocab() + 1);
    for (std::size_t i = ctx_.size(); i-- > 0;) r = r * base + ctx_[i];
    return r;
  }

  const NgramModel& m_;
  std::vector<std::size_t> ctx_;  // ctx_[0] is the most recent symbol
};

}  // namespace

std::unique_ptr<ArScorer> NgramModel::make_scorer() const {
  return std::make_unique<NgramScorer>(*this);
}

double NgramModel::accumulate_grad(const TokenString& seq,
                                   std::vector<double>* grad,
                                   std::size_t loss_from) const {
  const int v = vocab();
  check_tokens(seq, v, "NgramModel::accumulate_grad");
  if (grad->size() != params_.size()) {
    throw ArgumentError("gradient buffer size mismatch");
  }
  const std::size_t base = static_cast<std::size_t>(v + 1);
  // The context row is maintained incrementally: its digits (base vocab+1)
  // are the last `order` symbols, most recent in the lowest digit, begin
  // markers above the sequence start.
  std::vector<std::size_t> ctx(static_cast<std::size_t>(order_),
                               static_cast<std::size_t>(v));
  std::size_t row = 0;
  std::size_t top = 1;  // weight of the oldest digit
  for (int i = 0; i + 1 < order_; ++i) top *= base;
  for (std::size_t i = ctx.size(); i-- > 0;) row = row * base + ctx[i];
  std::vector<double> p(static_cast<std::size_t>(v));
  double nll = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const int target = seq[t];
    if (t >= loss_from) {
      const double* logits =
          params_.data() + row * static_cast<std::size_t>(v);
      const double lse = softmax_into(logits, v, p.data());
      nll += lse - logits[target];
      double* g = grad->data() + row * static_cast<std::size_t>(v);
      for (int k = 0; k < v; ++k) g[k] += p[static_cast<std::size_t>(k)];
      g[target] -= 1.0;
    }
    if (order_ > 0) {
      const std::size_t oldest = ctx[static_cast<std::size_t>(order_) - 1];
      for (std::size_t i = static_cast<std::size_t>(order_); i-- > 1;) {
        ctx[i] = ctx[i - 1];
      }
      ctx[0] = static_cast<std::size_t>(target);
      row = (row - oldest * top) * base + static_cast<std::size_t>(target);
    }
  }
  return nll;
}

// ---------------------------------------------------------------------------
// Recurrent network
// ---------------------------------------------------------------------------

namespace {

// Incremental parse of the self-delimiting formula code over the SAT
// vocabulary, used for the optional boundary input feature.  Mirrors the
// codec grammar: gamma(vars+1), gamma(nodes+1), the preorder tree (AND=00,
// OR=01, NOT=10, VAR=11 gamma(i) with 1 <= i <= vars), then vars roster
// ones exactly when the code would otherwise be shorter than vars bits.
// Once the code is complete, every later position is in the assignment
// region.  Structurally impossible prefixes park the tracker in an
// invalid state whose flag never turns on.
class SatBoundaryTracker {
 public:
  SatBoundaryTracker() { gamma_start(); }

  bool in_assignment() const { return phase_ == Phase::kAssign; }

  void consume(int token) {
    if (phase_ == Phase::kAssign || phase_ == Phase::kInvalid) return;
    if (token != 0 && token != 1) {
      phase_ = Phase::kInvalid;  // end token inside the formula region
      return;
    }
    ++bits_;
    const int bit = token;
    switch (phase_) {
      case Phase::kGammaJ: {
        unsigned long long v = 0;
        if (gamma_step(bit, &v)) {
          vars_ = v - 1;
          gamma_start();
          phase_ = Phase::kGammaM;
        }
        break;
      }
      case Phase::kGammaM: {
        unsigned long long v = 0;
        if (gamma_step(bit, &v)) {
          nodes_ = v - 1;
          if (nodes_ == 0) {
            finish_tree();
          } else {
            phase_ = Phase::kTree;
            outstanding_ = 1;
            consumed_nodes_ = 0;
            op_first_ = -1;
            in_var_gamma_ = false;
            gamma_start();
          }
        }
        break;
      }
      case Phase::kTree: {
        if (in_var_gamma_) {
          unsigned long long v = 0;
          if (gamma_step(bit, &v)) {
            if (v < 1 || v > vars_) {
              phase_ = Phase::kInvalid;
              break;
            }
            in_var_gamma_ = false;
            gamma_start();
            node_closed();
          }
          break;
        }
        if (op_first_ < 0) {
          op_first_ = bit;
          break;
        }
        const int op = op_first_ * 2 + bit;
        op_first_ = -1;
        if (++consumed_nodes_ > nodes_) {
          phase_ = Phase::kInvalid;
          break;
        }
        if (op == 0 || op == 1) {  // AND / OR: fill one slot, open two
          outstanding_ += 1;
        } else if (op == 3) {  // VAR: payload first
          in_var_gamma_ = true;
        }
        // NOT (op == 2) fills one slot and opens one: outstanding is
        // unchanged and stays positive, so the tree cannot close here.
        break;
      }
      case Phase::kRoster: {
        if (bit != 1) {
          phase_ = Phase::kInvalid;
          break;
        }
        if (--roster_left_ == 0) phase_ = Phase::kAssign;
        break;
      }
      case Phase::kAssign:
      case Phase::kInvalid:
        break;
    }
  }

 private:
  enum class Phase { kGammaJ, kGammaM, kTree, kRoster, kAssign, kInvalid };

  void gamma_start() {
    gamma_in_value_ = false;
    gamma_zeros_ = 0;
    gamma_remaining_ = 0;
    gamma_value_ = 0;
  }

  // Returns true when a value completes; mirrors the codec's 40-zero cap.
  bool gamma_step(int bit, unsigned long long* out) {
    if (!gamma_in_value_) {
      if (bit == 1) {
        gamma_in_value_ = true;
        gamma_value_ = 1;
        gamma_remaining_ = gamma_zeros_;
        if (gamma_remaining_ == 0) {
          *out = gamma_value_;
          gamma_start();
          return true;
        }
      } else if (++gamma_zeros_ > 40) {
        phase_ = Phase::kInvalid;
      }
      return false;
    }
    gamma_value_ = (gamma_value_ << 1) | static_cast<unsigned>(bit);
    if (--gamma_remaining_ == 0) {
      *out = gamma_value_;
      gamma_start();
      return true;
    }
    return false;
  }

  // A leaf (VAR) closed: one slot filled; only here can the tree complete.
  void node_closed() {
    outstanding_ -= 1;
    if (outstanding_ == 0) {
      if (consumed_nodes_ == nodes_) {
        finish_tree();
      } else {
        phase_ = Phase::kInvalid;
      }
    }
  }

  void finish_tree() {
    if (bits_ < vars_) {
      roster_left_ = vars_;  // >= 1: two gamma codes already took 2+ bits
      phase_ = Phase::kRoster;
    } else {
      phase_ = Phase::kAssign;
    }
  }

  Phase phase_ = Phase::kGammaJ;
  unsigned long long bits_ = 0;  // code bits consumed so far
  unsigned long long vars_ = 0;
  unsigned long long nodes_ = 0;
  unsigned long long outstanding_ = 0;
  unsigned long long consumed_nodes_ = 0;
  unsigned long long roster_left_ = 0;
  int op_first_ = -1;
  bool in_var_gamma_ = false;
  bool gamma_in_value_ = false;
  int gamma_zeros_ = 0;
  int gamma_remaining_ = 0;
  unsigned long long gamma_value_ = 0;
};

}  // namespace

std::size_t sat_target_start(const TokenString& seq) {
  SatBoundaryTracker tracker;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    tracker.consume(seq[i]);
    if (tracker.in_assignment()) return i + 1;
  }
  return 0;
}

int RecurrentModel::input_dim(int layer) const {
  return layer == 0 ? vocab() + 1 + (sat_boundary_ ? 1 : 0) : hidden_;
}

namespace {
std::size_t rnn_layer_block(int hidden, int in) {
  const std::size_t h = static_cast<std::size_t>(hidden);
  return 2 * (h * static_cast<std::size_t>(in) + h * h + h);
}
}  // namespace

std::size_t RecurrentModel::off_wz(int layer) const {
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l) off += rnn_layer_block(hidden_, input_dim(l));
  return off;
}
std::size_t RecurrentModel::off_uz(int layer) const {
  return off_wz(layer) + static_cast<std::size_t>(hidden_) *
                             static_cast<std::size_t>(input_dim(layer));
}
std::size_t RecurrentModel::off_bz(int layer) const {
  return off_uz(layer) +
         static_cast<std::size_t>(hidden_) * static_cast<std::size_t>(hidden_);
}
std::size_t RecurrentModel::off_wc(int layer) const {
  return off_bz(layer) + static_cast<std::size_t>(hidden_);
}
std::size_t RecurrentModel::off_uc(int layer) const {
  return off_wc(layer) + static_cast<std::size_t>(hidden_) *
                             static_cast<std::size_t>(input_dim(layer));
}
std::size_t RecurrentModel::off_bc(int layer) const {
  return off_uc(layer) +
         static_cast<std::size_t>(hidden_) * static_cast<std::size_t>(hidden_);
}
std::size_t RecurrentModel::off_wo() const { return off_wz(layers_); }
std::size_t RecurrentModel::off_bo() const {
  return off_wo() +
         static_cast<std::size_t>(vocab()) * static_cast<std::size_t>(hidden_);
}

RecurrentModel::RecurrentModel(int hidden, int layers, int vocab,
                               std::uint64_t seed, bool sat_boundary)
    : ArModel(vocab), hidden_(hidden), layers_(layers),
      sat_boundary_(sat_boundary) {
  if (hidden < 1 || layers < 1) {
    throw ArgumentError("recurrent model needs positive hidden size and layers");
  }
  if (hidden > kMaxHidden || layers > kMaxLayers) {
    throw CapacityError("recurrent model size beyond the desk-scale caps");
  }
  if (sat_boundary && vocab != kSatVocab) {
    throw ArgumentError(
        "the boundary feature is defined for the SAT vocabulary only");
  }
  params_.assign(off_bo() + static_cast<std::size_t>(vocab), 0.0);
  // Recurrent blocks start at small seeded uniforms to break symmetry;
  // biases and the readout start at zero, so the untrained conditional is
  // exactly uniform.
  Rng rng(seed);
  const double scale = 0.5 / std::sqrt(static_cast<double>(hidden));
  for (int l = 0; l < layers; ++l) {
    const std::size_t h = static_cast<std::size_t>(hidden);
    const std::size_t in = static_cast<std::size_t>(input_dim(l));
    const auto fill = [&](std::size_t off, std::size_t n) {
      for (std::size_t i = 0; i < n; ++i) {
        params_[off + i] = (2.0 * rand_unit(rng) - 1.0) * scale;
      }
    };
    fill(off_wz(l), h * in);
    fill(off_uz(l), h * h);
    fill(off_wc(l), h * in);
    fill(off_uc(l), h * h);
  }
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Read-only views of one layer's parameter blocks.
struct RnnLayer {
  const double* wz;
  const double* uz;
  const double* bz;
  const double* wc;
  const double* uc;
  const double* bc;
  int in;
};

std::vector<RnnLayer> rnn_layers(const RecurrentModel& m,
                                 const std::vector<double>& w) {
  std::vector<RnnLayer> out;
  out.reserve(static_cast<std::size_t>(m.layers()));
  for (int l = 0; l < m.layers(); ++l) {
    out.push_back(RnnLayer{w.data() + m.off_wz(l), w.data() + m.off_uz(l),
                           w.data() + m.off_bz(l), w.data() + m.off_wc(l),
                           w.data() + m.off_uc(l), w.data() + m.off_bc(l),
                           m.input_dim(l)});
  }
  return out;
}

// One forward step across all layers.  x_index is the one-hot input column
// for layer 0 (the begin marker is index vocab); extra_index names a second
// active layer-0 column (-1 when absent, the boundary flag otherwise); each
// upper layer consumes the fresh state of the layer below.  h (layers x H,
// flattened) is updated in place; when zrec/crec are non-null the gate and
// candidate activations are recorded there (same layout) for backpropagation.
void rnn_step(const std::vector<RnnLayer>& layers, int H, int x_index,
              int extra_index, double* h, double* zrec, double* crec) {
  thread_local std::vector<double> az;
  thread_local std::vector<double> ac;
  az.assign(static_cast<std::size_t>(H), 0.0);
  ac.assign(static_cast<std::size_t>(H), 0.0);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const RnnLayer& L = layers[l];
    double* hl = h + l * static_cast<std::size_t>(H);
    const double* x = l == 0 ? nullptr : h + (l - 1) * static_cast<std::size_t>(H);
    for (int i = 0; i < H; ++i) {
      double sz = L.bz[i];
      double sc = L.bc[i];
      const std::size_t ri = static_cast<std::size_t>(i) *
                             static_cast<std::size_t>(L.in);
      if (l == 0) {
        sz += L.wz[ri + static_cast<std::size_t>(x_index)];
        sc += L.wc[ri + static_cast<std::size_t>(x_index)];
        if (extra_index >= 0) {
          sz += L.wz[ri + static_cast<std::size_t>(extra_index)];
          sc += L.wc[ri + static_cast<std::size_t>(extra_index)];
        }
      } else {
        for (int k = 0; k < H; ++k) {
          sz += L.wz[ri + static_cast<std::size_t>(k)] * x[k];
          sc += L.wc[ri + static_cast<std::size_t>(k)] * x[k];
        }
      }
      const std::size_t ui = static_cast<std::size_t>(i) *
                             static_cast<std::size_t>(H);
      for (int k = 0; k < H; ++k) {
        sz += L.uz[ui + static_cast<std::size_t>(k)] * hl[k];
        sc += L.uc[ui + static_cast<std::size_t>(k)] * hl[k];
      }
      az[static_cast<std::size_t>(i)] = sz;
      ac[static_cast<std::size_t>(i)] = sc;
    }
    for (int i = 0; i < H; ++i) {
      const double z = sigmoid(az[static_cast<std::size_t>(i)]);
      const double c = std::tanh(ac[static_cast<std::size_t>(i)]);
      const double hn = z * c + (1.0 - z) * hl[i];
      if (zrec) zrec[l * static_cast<std::size_t>(H) + static_cast<std::size_t>(i)] = z;
      if (crec) crec[l * static_cast<std::size_t>(H) + static_cast<std::size_t>(i)] = c;
      hl[i] = hn;
    }
  }
}

class RecurrentScorer final : public ArScorer {
 public:
  explicit RecurrentScorer(const RecurrentModel& m)
      : m_(m),
        layers_(rnn_layers(m, m.params())),
        h_(static_cast<std::size_t>(m.layers()) *
               static_cast<std::size_t>(m.hidden()),
           0.0) {
    // Begin-marker step; no prefix is consumed yet so the boundary flag
    // (when the feature is on) is necessarily off.
    rnn_step(layers_, m_.hidden(), m_.vocab(), -1, h_.data(), nullptr,
             nullptr);
  }

  std::vector<double> dist() const override {
    const int v = m_.vocab();
    const int H = m_.hidden();
    const double* wo = m_.params().data() + m_.off_wo();
    const double* bo = m_.params().data() + m_.off_bo();
    const double* htop = h_.data() +
                         static_cast<std::size_t>(m_.layers() - 1) *
                             static_cast<std::size_t>(H);
    std::vector<double> logits(static_cast<std::size_t>(v));
    for (int o = 0; o < v; ++o) {
      double s = bo[o];
      const std::size_t ri = static_cast<std::size_t>(o) *
                             static_cast<std::size_t>(H);
      for (int k = 0; k < H; ++k) s += wo[ri + static_cast<std::size_t>(k)] * htop[k];
      logits[static_cast<std::size_t>(o)] = s;
    }
    std::vector<double> d(static_cast<std::size_t>(v));
    softmax_into(logits.data(), v, d.data());
    return d;
  }

  void advance(int tok) override {
    if (tok < 0 || tok >= m_.vocab()) {
      throw ArgumentError("token outside vocabulary");
    }
    int extra = -1;
    if (m_.sat_boundary()) {
      tracker_.consume(tok);
      if (tracker_.in_assignment()) extra = m_.vocab() + 1;
    }
    rnn_step(layers_, m_.hidden(), tok, extra, h_.data(), nullptr, nullptr);
  }

 private:
  const RecurrentModel& m_;
  std::vector<RnnLayer> layers_;
  std::vector<double> h_;
  SatBoundaryTracker tracker_;
};

}  // namespace

std::unique_ptr<ArScorer> RecurrentModel::make_scorer() const {
  return std::make_unique<RecurrentScorer>(*this);
}

double RecurrentModel::accumulate_grad(const TokenString& seq,
                                       std::vector<double>* grad,
                                       std::size_t loss_from) const {
  const int v = vocab();
  check_tokens(seq, v, "RecurrentModel::accumulate_grad");
  if (grad->size() != params_.size()) {
    throw ArgumentError("gradient buffer size mismatch");
  }
  const int H = hidden_;
  const int L = layers_;
  const std::size_t lh = static_cast<std::size_t>(L) * static_cast<std::size_t>(H);
  const std::size_t T = seq.size();
  if (T == 0) return 0.0;

  const std::vector<RnnLayer> layers = rnn_layers(*this, params_);
  const double* wo = params_.data() + off_wo();
  const double* bo = params_.data() + off_bo();

  // Forward pass, recording everything the backward pass needs.
  std::vector<double> hs(T * lh);        // state after step t
  std::vector<double> zs(T * lh);        // gate activations
  std::vector<double> cs(T * lh);        // candidate activations
  std::vector<double> ps(T * static_cast<std::size_t>(v));  // output probs
  std::vector<int> xs(T);                // layer-0 input index at step t
  std::vector<int> xe(T, -1);            // layer-0 extra column at step t
  std::vector<double> h(lh, 0.0);
  std::vector<double> logits(static_cast<std::size_t>(v));
  SatBoundaryTracker tracker;
  double nll = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    xs[t] = t == 0 ? v : seq[t - 1];
    if (sat_boundary_ && t > 0) {
      tracker.consume(seq[t - 1]);
      if (tracker.in_assignment()) xe[t] = v + 1;
    }
    rnn_step(layers, H, xs[t], xe[t], h.data(), zs.data() + t * lh,
             cs.data() + t * lh);
    std::copy(h.begin(), h.end(), hs.begin() + static_cast<std::ptrdiff_t>(t * lh));
    if (t < loss_from) continue;  // conditioning only: no loss, no readout
    const double* htop = h.data() + static_cast<std::size_t>(L - 1) *
                                        static_cast<std::size_t>(H);
    for (int o = 0; o < v; ++o) {
      double s = bo[o];
      const std::size_t ri = static_cast<std::size_t>(o) *
                             static_cast<std::size_t>(H);
      for (int k = 0; k < H; ++k) s += wo[ri + static_cast<std::size_t>(k)] * htop[k];
      logits[static_cast<std::size_t>(o)] = s;
    }
    double* pt = ps.data() + t * static_cast<std::size_t>(v);
    const double lse = softmax_into(logits.data(), v, pt);
    nll += lse - logits[static_cast<std::size_t>(seq[t])];
  }

  // Backward pass.
  double* g = grad->data();
  double* gwo = g + off_wo();
  double* gbo = g + off_bo();
  std::vector<double> carry(lh, 0.0);  // d loss / d h_t flowing from t+1
  std::vector<double> dh(lh);
  std::vector<double> dlog(static_cast<std::size_t>(v));
  std::vector<double> daz(static_cast<std::size_t>(H));
  std::vector<double> dac(static_cast<std::size_t>(H));
  const std::vector<double> zeros(static_cast<std::size_t>(H), 0.0);
  for (std::size_t t = T; t-- > 0;) {
    std::copy(carry.begin(), carry.end(), dh.begin());
    if (t >= loss_from) {
      const double* pt = ps.data() + t * static_cast<std::size_t>(v);
      for (int o = 0; o < v; ++o) dlog[static_cast<std::size_t>(o)] = pt[o];
      dlog[static_cast<std::size_t>(seq[t])] -= 1.0;

      const double* htop = hs.data() + t * lh +
                           static_cast<std::size_t>(L - 1) *
                               static_cast<std::size_t>(H);
      double* dhtop = dh.data() + static_cast<std::size_t>(L - 1) *
                                      static_cast<std::size_t>(H);
      for (int o = 0; o < v; ++o) {
        const double dv = dlog[static_cast<std::size_t>(o)];
        const std::size_t ri = static_cast<std::size_t>(o) *
                               static_cast<std::size_t>(H);
        gbo[o] += dv;
        for (int k = 0; k < H; ++k) {
          gwo[ri + static_cast<std::size_t>(k)] += dv * htop[k];
          dhtop[k] += wo[ri + static_cast<std::size_t>(k)] * dv;
        }
      }
    }

    for (int l = L - 1; l >= 0; --l) {
      const RnnLayer& lay = layers[static_cast<std::size_t>(l)];
      const std::size_t lo = static_cast<std::size_t>(l) *
                             static_cast<std::size_t>(H);
      const double* hprev =
          t > 0 ? hs.data() + (t - 1) * lh + lo : zeros.data();
      const double* zt = zs.data() + t * lh + lo;
      const double* ct = cs.data() + t * lh + lo;
      const double* x = l == 0
                            ? nullptr
                            : hs.data() + t * lh +
                                  static_cast<std::size_t>(l - 1) *
                                      static_cast<std::size_t>(H);
      double* dhl = dh.data() + lo;
      double* carryl = carry.data() + lo;
      for (int i = 0; i < H; ++i) {
        const double z = zt[i];
        const double c = ct[i];
        const double dz = dhl[i] * (c - hprev[i]);
        const double dc = dhl[i] * z;
        carryl[i] = dhl[i] * (1.0 - z);  // d/dh_prev, direct term
        daz[static_cast<std::size_t>(i)] = dz * z * (1.0 - z);
        dac[static_cast<std::size_t>(i)] = dc * (1.0 - c * c);
      }
      double* gwz = g + off_wz(l);
      double* guz = g + off_uz(l);
      double* gbz = g + off_bz(l);
      double* gwc = g + off_wc(l);
      double* guc = g + off_uc(l);
      double* gbc = g + off_bc(l);
      double* dx = l == 0 ? nullptr
                          : dh.data() + static_cast<std::size_t>(l - 1) *
                                            static_cast<std::size_t>(H);
      for (int i = 0; i < H; ++i) {
        const double az_i = daz[static_cast<std::size_t>(i)];
        const double ac_i = dac[static_cast<std::size_t>(i)];
        gbz[i] += az_i;
        gbc[i] += ac_i;
        const std::size_t ui = static_cast<std::size_t>(i) *
                               static_cast<std::size_t>(H);
        for (int k = 0; k < H; ++k) {
          guz[ui + static_cast<std::size_t>(k)] += az_i * hprev[k];
          guc[ui + static_cast<std::size_t>(k)] += ac_i * hprev[k];
          carryl[k] += lay.uz[ui + static_cast<std::size_t>(k)] * az_i +
                       lay.uc[ui + static_cast<std::size_t>(k)] * ac_i;
        }
        const std::size_t ri = static_cast<std::size_t>(i) *
                               static_cast<std::size_t>(lay.in);
        if (l == 0) {
          gwz[ri + static_cast<std::size_t>(xs[t])] += az_i;
          gwc[ri + static_cast<std::size_t>(xs[t])] += ac_i;
          if (xe[t] >= 0) {
            gwz[ri + static_cast<std::size_t>(xe[t])] += az_i;
            gwc[ri + static_cast<std::size_t>(xe[t])] += ac_i;
          }
        } else {
          for (int k = 0; k < H; ++k) {
            gwz[ri + static_cast<std::size_t>(k)] += az_i * x[k];
            gwc[ri + static_cast<std::size_t>(k)] += ac_i * x[k];
            dx[k] += lay.wz[ri + static_cast<std::size_t>(k)] * az_i +
                     lay.wc[ri + static_cast<std::size_t>(k)] * ac_i;
          }
        }
      }
    }
  }
  return nll;
}

// ---------------------------------------------------------------------------
// Scoring helpers
// ---------------------------------------------------------------------------

double seq_nll(const ArModel& model, const TokenString& seq,
               std::size_t loss_from) {
  check_tokens(seq, model.vocab(), "seq_nll");
  std::unique_ptr<ArScorer> scorer = model.make_scorer();
  double nll = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (t >= loss_from) {
      const std::vector<double> d = scorer->dist();
      nll += -std::log(d[static_cast<std::size_t>(seq[t])]);
    }
    scorer->advance(seq[t]);
  }
  return nll;
}

double corpus_ce(const ArModel& model, const std::vector<TokenString>& corpus) {
  if (corpus.empty()) throw ArgumentError("cross-entropy over an empty corpus");
  double nll = 0.0;
  std::size_t tokens = 0;
  for (const TokenString& seq : corpus) {
    nll += seq_nll(model, seq);
    tokens += seq.size();
  }
  if (tokens == 0) throw ArgumentError("corpus holds no tokens");
  return nll / static_cast<double>(tokens);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

void check_train_config(const TrainConfig& cfg) {
  if (!(cfg.lr > 0.0)) throw ArgumentError("learning rate must be positive");
  if (cfg.batch < 1) throw ArgumentError("batch size must be at least 1");
  if (cfg.early_stop_patience < 1) {
    throw ArgumentError("early-stop patience must be at least 1");
  }
  if (cfg.max_epochs < 1) throw ArgumentError("max epochs must be at least 1");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw ArgumentError("momentum must lie in [0, 1)");
  }
}

}  // namespace

TrainResult train_ar(ArModel& model, const std::vector<TokenString>& train,
                     const std::vector<TokenString>& dev,
                     const TrainConfig& cfg) {
  check_train_config(cfg);
  if (train.empty()) throw ArgumentError("training needs a nonempty train split");
  if (dev.empty()) throw ArgumentError("training needs a nonempty dev split");
  for (const TokenString& s : train) check_tokens(s, model.vocab(), "train_ar");
  for (const TokenString& s : dev) check_tokens(s, model.vocab(), "train_ar");

  TrainResult result;

  if (model.params().empty()) {
    // Nonparametric kind: the fit is exact counting, one "epoch", and the
    // recorded losses are exact empirical cross-entropies.
    model.fit(train);
    result.train_loss.push_back(corpus_ce(model, train));
    result.dev_loss.push_back(corpus_ce(model, dev));
    result.accepted_epochs.push_back(0);
    result.best_epoch = 0;
    result.best_dev_loss = result.dev_loss[0];
    return result;
  }

  std::vector<double>& params = model.params();
  std::vector<double> grad(params.size());
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> best_params = params;
  std::vector<double> last_stable = params;
  double best = kInf;
  int bad = 0;

  // Conditional mode: the loss on each sequence starts where its formula
  // code ends (0 -- the whole sequence -- when it never completes one).
  std::vector<std::size_t> train_from(train.size(), 0);
  std::vector<std::size_t> dev_from(dev.size(), 0);
  if (cfg.conditional) {
    for (std::size_t i = 0; i < train.size(); ++i) {
      train_from[i] = sat_target_start(train[i]);
    }
    for (std::size_t i = 0; i < dev.size(); ++i) {
      dev_from[i] = sat_target_start(dev[i]);
    }
  }
  const auto dev_loss_now = [&]() {
    double nll = 0.0;
    std::size_t tokens = 0;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      nll += seq_nll(model, dev[i], dev_from[i]);
      tokens += dev[i].size() - dev_from[i];
    }
    if (tokens == 0) throw ArgumentError("dev split holds no scored tokens");
    return nll / static_cast<double>(tokens);
  };

  Rng shuffle_rng(derive_seed(cfg.seed, 0x5a9d3));
  std::vector<std::size_t> perm(train.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;

  const auto diverged = [&](const char* what, int epoch) {
    params = last_stable;
    throw TrainingError(std::string("training diverged (") + what +
                        " at epoch " + std::to_string(epoch) +
                        "); model restored to the last stable checkpoint");
  };

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    // Seeded Fisher-Yates shuffle.
    for (std::size_t i = perm.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rand_below(shuffle_rng, i));
      std::swap(perm[i - 1], perm[j]);
    }
    double epoch_nll = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < perm.size();
         start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t stop = std::min(
          perm.size(), start + static_cast<std::size_t>(cfg.batch));
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_nll = 0.0;
      std::size_t batch_tokens = 0;
      for (std::size_t i = start; i < stop; ++i) {
        const TokenString& seq = train[perm[i]];
        const std::size_t from = train_from[perm[i]];
        batch_nll += model.accumulate_grad(seq, &grad, from);
        batch_tokens += seq.size() - from;
      }
      if (batch_tokens == 0) continue;
      if (!std::isfinite(batch_nll)) diverged("non-finite batch loss", epoch);
      const double inv = 1.0 / static_cast<double>(batch_tokens);
      for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = cfg.momentum * velocity[i] - cfg.lr * grad[i] * inv;
        params[i] += velocity[i];
      }
      epoch_nll += batch_nll;
      epoch_tokens += batch_tokens;
    }
    if (epoch_tokens == 0) throw ArgumentError("train split holds no tokens");
    const double train_loss = epoch_nll / static_cast<double>(epoch_tokens);
    const double dev_ce = dev_loss_now();
    if (!std::isfinite(train_loss) || !std::isfinite(dev_ce)) {
      diverged("non-finite epoch loss", epoch);
    }
    result.train_loss.push_back(train_loss);
    result.dev_loss.push_back(dev_ce);
    if (dev_ce < best) {
      best = dev_ce;
      result.best_epoch = epoch;
      result.accepted_epochs.push_back(epoch);
      best_params = params;
      bad = 0;
    } else {
      ++bad;
    }
    last_stable = params;
    if (bad >= cfg.early_stop_patience) break;
  }

  params = best_params;
  result.best_dev_loss = best;
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

struct EvalCell {
  double tok_nll = 0.0;
  std::size_t tok_count = 0;
  double enum_realized = 0.0;
  double enum_oracle = 0.0;
  double assign_nll = 0.0;
  std::size_t assign_bits = 0;
  bool satisfiable = false;
};

// NLL of the binary renormalization num/den; +infinity when the model put
// no mass on the realized side (or none on bits at all).
double renorm_nll(double num, double den) {
  if (!(den > 0.0) || !(num > 0.0)) return kInf;
  return -std::log(num / den);
}

EvalCell eval_one(const ArModel& model, const Example& e) {
  const int j = e.formula.var_count;
  if (e.assignment.size() != static_cast<std::size_t>(j) + 1) {
    throw ArgumentError("example assignment length does not match the formula");
  }
  const Formula f = cnf3_to_formula(e.formula);
  const TokenString seq = example_sequence(e);
  const std::size_t pos = enc(f).size();
  EvalCell cell;
  cell.satisfiable = e.target_prefix != 0;
  std::unique_ptr<ArScorer> scorer = model.make_scorer();
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const std::vector<double> d = scorer->dist();
    const int tok = seq[t];
    cell.tok_nll += -std::log(d[static_cast<std::size_t>(tok)]);
    ++cell.tok_count;
    if (t == pos) {
      const double q0 = d[0];
      const double q1 = d[1];
      const double qs = q0 + q1;
      cell.enum_realized = renorm_nll(tok == 0 ? q0 : q1, qs);
      const Int s = count_satisfying(f);
      const Int sp1 = s + 1;
      const double p1 = Rat(s, sp1).get_d();
      const double p0 = 1.0 - p1;
      double ce = 0.0;
      if (p0 > 0.0) ce += p0 * renorm_nll(q0, qs);
      if (p1 > 0.0) ce += p1 * renorm_nll(q1, qs);
      cell.enum_oracle = ce;
    } else if (cell.satisfiable && t > pos && t <= pos + static_cast<std::size_t>(j)) {
      const double qs = d[0] + d[1];
      cell.assign_nll += renorm_nll(d[static_cast<std::size_t>(tok)], qs);
      ++cell.assign_bits;
    }
    scorer->advance(tok);
  }
  return cell;
}

}  // namespace

EvalReport evaluate_ar(const ArModel& model,
                       const std::vector<Example>& examples, int threads) {
  if (examples.empty()) {
    throw ArgumentError("evaluation needs at least one example");
  }
  if (threads < 1) throw ArgumentError("thread count must be at least 1");
  const std::size_t n = examples.size();
  std::vector<EvalCell> cells(n);
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) cells[i] = eval_one(model, examples[i]);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::mutex error_mu;
    std::exception_ptr error;
    const auto work = [&]() {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= n) return;
        try {
          cells[i] = eval_one(model, examples[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  // Reduce in example order so the report is thread-count independent.
  double tok_nll = 0.0;
  std::size_t tok_count = 0;
  double enum_r = 0.0;
  double enum_o = 0.0;
  double assign = 0.0;
  std::size_t assign_bits = 0;
  long satisfiable = 0;
  for (const EvalCell& c : cells) {
    tok_nll += c.tok_nll;
    tok_count += c.tok_count;
    enum_r += c.enum_realized;
    enum_o += c.enum_oracle;
    assign += c.assign_nll;
    assign_bits += c.assign_bits;
    if (c.satisfiable) ++satisfiable;
  }
  EvalReport report;
  report.token_ppl = std::exp(tok_nll / static_cast<double>(tok_count));
  report.enumeration_ppl = std::exp(enum_r / static_cast<double>(n));
  report.enumeration_ppl_oracle = std::exp(enum_o / static_cast<double>(n));
  report.assignment_ppl =
      assign_bits == 0 ? 1.0
                       : std::exp(assign / static_cast<double>(assign_bits));
  report.n_examples = static_cast<long>(n);
  report.n_satisfiable = satisfiable;
  return report;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

SampleResult sample_ar(const ArModel& model, Rng& rng, std::size_t max_len) {
  const int v = model.vocab();
  const int end = end_token(v);
  SampleResult out;
  std::unique_ptr<ArScorer> scorer = model.make_scorer();
  for (std::size_t t = 0; t < max_len; ++t) {
    const std::vector<double> d = scorer->dist();
    const double u = rand_unit(rng);
    double cum = 0.0;
    int tok = v - 1;  // floating-point residue falls to the last symbol
    for (int k = 0; k < v; ++k) {
      cum += d[static_cast<std::size_t>(k)];
      if (u < cum) {
        tok = k;
        break;
      }
    }
    if (tok == end) return out;
    out.tokens.push_back(tok);
    scorer->advance(tok);
  }
  out.truncated = true;
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kCheckpointFormat = "satlab-ar-v1";
constexpr std::size_t kMaxTrieNodes = std::size_t{1} << 26;

void read_exact(std::ifstream& in, void* dst, std::size_t bytes,
                const std::string& path) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw IoError("checkpoint truncated", path);
  }
}

}  // namespace

void save_ar(const ArModel& model, const std::string& path,
             const std::map<std::string, std::string>& meta) {
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["kind"] = model.kind();
  j["vocab"] = model.vocab();
  j["param_count"] = model.params().size();
  if (const auto* ngram = dynamic_cast<const NgramModel*>(&model)) {
    j["order"] = ngram->order();
  }
  if (const auto* rnn = dynamic_cast<const RecurrentModel*>(&model)) {
    j["hidden"] = rnn->hidden();
    j["layers"] = rnn->layers();
    j["boundary"] = rnn->sat_boundary();
  }
  const auto* trie = dynamic_cast<const TrieArModel*>(&model);
  if (trie) j["node_count"] = trie->nodes().size();
  j["meta"] = meta;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing", path);
  out << j.dump() << '\n';
  if (trie) {
    for (const TrieArModel::Node& node : trie->nodes()) {
      const std::int64_t count = node.count;
      out.write(reinterpret_cast<const char*>(&count), sizeof count);
      for (int c : node.child) {
        const std::int32_t ci = c;
        out.write(reinterpret_cast<const char*>(&ci), sizeof ci);
      }
    }
  } else {
    const std::vector<double>& p = model.params();
    out.write(reinterpret_cast<const char*>(p.data()),
              static_cast<std::streamsize>(p.size() * sizeof(double)));
  }
  out.flush();
  if (!out) throw IoError("failed writing checkpoint", path);
}

std::unique_ptr<ArModel> load_ar(const std::string& path,
                                 std::map<std::string, std::string>* meta_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint", path);
  std::string header;
  if (!std::getline(in, header)) {
    throw IoError("checkpoint missing its header line", path);
  }
  const nlohmann::json j = nlohmann::json::parse(header, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError("checkpoint header is not valid JSON", 0);
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw ParseError("unsupported checkpoint format", 0);
    }
    const std::string kind = j.at("kind").get<std::string>();
    const int vocab = j.at("vocab").get<int>();
    const std::size_t declared = j.at("param_count").get<std::size_t>();
    std::unique_ptr<ArModel> model;
    if (kind == "trie") {
      auto trie = std::make_unique<TrieArModel>(vocab);
      const std::size_t count = j.at("node_count").get<std::size_t>();
      if (count == 0 || count > kMaxTrieNodes) {
        throw ParseError("checkpoint trie node count out of range", 0);
      }
      std::vector<TrieArModel::Node> nodes(count);
      for (TrieArModel::Node& node : nodes) {
        std::int64_t c = 0;
        read_exact(in, &c, sizeof c, path);
        node.count = c;
        node.child.resize(static_cast<std::size_t>(vocab));
        for (int& ci : node.child) {
          std::int32_t raw = 0;
          read_exact(in, &raw, sizeof raw, path);
          ci = raw;
        }
      }
      trie->set_nodes(std::move(nodes));
      model = std::move(trie);
    } else if (kind == "ngram") {
      model = std::make_unique<NgramModel>(j.at("order").get<int>(), vocab);
    } else if (kind == "rnn") {
      model = std::make_unique<RecurrentModel>(
          j.at("hidden").get<int>(), j.at("layers").get<int>(), vocab, 0,
          j.value("boundary", false));
    } else {
      throw ParseError("unknown checkpoint kind '" + kind + "'", 0);
    }
    if (model->params().size() != declared) {
      throw ParseError("checkpoint parameter count mismatch", 0);
    }
    if (!model->params().empty()) {
      read_exact(in, model->params().data(),
                 model->params().size() * sizeof(double), path);
    }
    if (in.get() != std::ifstream::traits_type::eof()) {
      throw ParseError("checkpoint has trailing bytes", 0);
    }
    if (meta_out) {
      *meta_out = j.value("meta", nlohmann::json::object())
                      .get<std::map<std::string, std::string>>();
    }
    return model;
  } catch (const ParseError&) {
    throw;
  } catch (const IoError&) {
    throw;
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("checkpoint invalid: ") + e.what(), 0);
  } catch (const CapacityError& e) {
    throw ParseError(std::string("checkpoint invalid: ") + e.what(), 0);
  } catch (const nlohmann::json::exception&) {
    throw ParseError("checkpoint header missing required fields", 0);
  }
}

}  // namespace satlang

