// seqmodel.hpp -- autoregressive sequence models over token strings.
//
// Desk-scale learning stack.  Three autoregressive model kinds share one
// streaming interface: an exact empirical trie (the nonparametric
// maximum-likelihood reference), a softmax n-gram table, and a small
// recurrent network whose single gate forms a convex blend of a candidate
// state and the carried state.  Every model emits, position by position, a
// conditional distribution over a fixed vocabulary whose highest id is the
// end-of-sequence token.  The SAT task uses vocabulary {0, 1, end}; the
// residual-EBM toy corpora reuse the same machinery with a wider alphabet.
//
// Training is plain minibatch SGD with optional momentum and
// patience-based early stopping against a dev split; the first checkpoint
// attaining the minimum dev loss is the one returned.  The cross-entropy
// may cover the whole sequence (default) or, in conditional mode, only the
// tokens past the self-delimiting formula code -- the formula then acts as
// conditioning context, which is how a sequence-to-sequence learner sees
// the task.  All training is single-threaded and bit-deterministic given
// the seed; evaluation may fan out across threads because scoring is a
// pure read, and its reduction order is fixed so the report is
// byte-identical at any thread count.
//
// Each dataset example becomes one token string:
//
//   bits of enc(formula) ++ assignment bits ++ end token
//
// The conditioning context encodes the example's original formula while
// the assignment bits target its add-one extension (their leading bit is
// the satisfiability indicator).  The two parts abut with no separator
// token: the code is self-delimiting, so the boundary is implicit.  Metric
// positions are recovered from the example, never guessed by the model.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "satlang/datagen.hpp"
#include "satlang/errors.hpp"
#include "satlang/rng.hpp"

namespace satlang {

// ---------------------------------------------------------------------------
// Tokens and sequences
// ---------------------------------------------------------------------------

// Token ids run 0 .. vocab-1; id vocab-1 is always the end-of-sequence
// token.  The SAT vocabulary is {0, 1, end}.
using TokenString = std::vector<int>;

inline constexpr int kSatVocab = 3;

inline constexpr int end_token(int vocab) { return vocab - 1; }

// Token string for one dataset example (see the header comment for the
// layout).  Deterministic in the example alone.
TokenString example_sequence(const Example& e);

// Index of the first assignment token in example_sequence(e), i.e. the bit
// length of the encoded formula.
std::size_t assignment_position(const Example& e);

// Recovers that index from the tokens alone by incrementally parsing the
// self-delimiting code: the number of leading tokens forming a complete
// formula code.  Returns 0 when the sequence never completes a code (so
// callers treating the result as "first target position" naturally fall
// back to scoring the whole sequence).  Agrees with assignment_position on
// every genuine example sequence.
std::size_t sat_target_start(const TokenString& seq);

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

// Streaming left-to-right scorer.  Immediately after construction, dist()
// is the conditional distribution for position 0; each advance(token)
// consumes one realized token and moves to the next position.
class ArScorer {
 public:
  virtual ~ArScorer() = default;

  // Conditional distribution over the vocabulary.  Entries are nonnegative
  // and sum to 1 within 1e-9 in every reachable state.  States reached only
  // through zero-probability events (an unseen trie branch) fall back to
  // the uniform distribution so the normalization contract is total.
  virtual std::vector<double> dist() const = 0;

  virtual void advance(int token) = 0;
};

class ArModel {
 public:
  virtual ~ArModel() = default;

  virtual std::string kind() const = 0;
  int vocab() const { return vocab_; }

  // Flat trainable parameters.  Empty exactly for nonparametric kinds,
  // which is how the trainer decides between a counting fit and SGD.
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  virtual std::unique_ptr<ArScorer> make_scorer() const = 0;

  // Rebuilds nonparametric state from a corpus (the trie's entire "fit").
  // Parametric kinds ignore the call.
  virtual void fit(const std::vector<TokenString>& corpus);

  // Adds the gradient of the sequence negative log-likelihood (nats) with
  // respect to params() into *grad (which must already have the same
  // length) and returns that NLL.  Positions before loss_from condition the
  // model but contribute neither loss nor readout gradient -- parameters
  // used there still receive gradient through their effect on later
  // positions, which is what training a conditional model means.  The
  // default 0 scores the whole sequence.  Throws ArgumentError for kinds
  // without trainable parameters.
  virtual double accumulate_grad(const TokenString& seq,
                                 std::vector<double>* grad,
                                 std::size_t loss_from = 0) const;

 protected:
  explicit ArModel(int vocab);
  std::vector<double> params_;

 private:
  int vocab_;
};

// Exact empirical trie: after fit(corpus) every conditional equals the
// exact ratio of corpus counts, so its cross-entropy on the corpus is the
// corpus's empirical conditional entropy -- a lower bound no trained model
// can beat on data drawn from the trie's own distribution.  Prefixes that
// never occurred in the corpus score probability zero (their NLL is
// +infinity); states past such an event report the uniform fallback.
//
// fit() requires every sequence to be end-terminated: exactly one end
// token, in the final position.  That rules out one corpus sequence being
// a strict prefix of another, which is precisely what makes every
// reachable conditional sum to 1.
class TrieArModel final : public ArModel {
 public:
  explicit TrieArModel(int vocab = kSatVocab);

  std::string kind() const override { return "trie"; }
  std::unique_ptr<ArScorer> make_scorer() const override;
  void fit(const std::vector<TokenString>& corpus) override;

  // Node storage, exposed for serialization.  count is the number of corpus
  // sequences whose prefix reaches the node; child holds one node index per
  // vocabulary symbol, -1 when unseen.
  struct Node {
    long long count = 0;
    std::vector<int> child;
  };
  const std::vector<Node>& nodes() const { return nodes_; }
  void set_nodes(std::vector<Node> nodes);

 private:
  std::vector<Node> nodes_;
};

// Softmax n-gram table.  The conditional at a position depends on the last
// `order` tokens (positions before the start read a begin marker), indexed
// into a dense table of logits with one row per context and one column per
// vocabulary symbol.  Parameters start at zero, i.e. every conditional
// starts uniform.
class NgramModel final : public ArModel {
 public:
  static constexpr int kMaxOrder = 8;

  // Throws ArgumentError for order < 0 and CapacityError for order beyond
  // kMaxOrder (the table is dense in (vocab+1)^order).
  NgramModel(int order, int vocab = kSatVocab);

  std::string kind() const override { return "ngram"; }
  int order() const { return order_; }
  std::unique_ptr<ArScorer> make_scorer() const override;
  double accumulate_grad(const TokenString& seq, std::vector<double>* grad,
                         std::size_t loss_from = 0) const override;

  std::size_t context_rows() const { return rows_; }

 private:
  int order_;
  std::size_t rows_;
};

// Single-gate recurrent network.  Per layer and step, with x the one-hot
// previous token (or a begin marker at position 0) for layer 0 and the
// lower layer's state otherwise:
//
//   z = sigmoid(Wz x + Uz h + bz)        gate
//   c = tanh   (Wc x + Uc h + bc)        candidate
//   h' = z * c + (1 - z) * h             convex blend
//
// The top layer's state feeds a linear softmax readout.  The readout
// starts at zero so an untrained model emits exactly the uniform
// distribution; recurrent weights start at small seeded uniforms to break
// symmetry.  Backpropagation through time is exact and runs over the full
// sequence.
//
// Optional SAT boundary feature (sat_boundary = true, SAT vocabulary
// only): layer 0 gains one input column that is set exactly at positions
// past the end of the self-delimiting formula code, i.e. at the
// assignment bits and the end token.  The flag is a deterministic
// function of the tokens already consumed (an incremental parse of the
// code finds the boundary), so it adds no information beyond the prefix
// -- it only spares the small network the bookkeeping that a
// conditional-generation setup gets from its architecture, where the
// decoder always knows it is emitting assignment symbols.  Prefixes that
// are not valid formula codes simply never set the flag.
class RecurrentModel final : public ArModel {
 public:
  static constexpr int kMaxHidden = 64;
  static constexpr int kMaxLayers = 2;

  // Throws ArgumentError for nonpositive sizes (or sat_boundary outside
  // the SAT vocabulary) and CapacityError beyond the caps above.
  RecurrentModel(int hidden, int layers, int vocab = kSatVocab,
                 std::uint64_t seed = 0, bool sat_boundary = false);

  std::string kind() const override { return "rnn"; }
  int hidden() const { return hidden_; }
  int layers() const { return layers_; }
  bool sat_boundary() const { return sat_boundary_; }
  std::unique_ptr<ArScorer> make_scorer() const override;
  double accumulate_grad(const TokenString& seq, std::vector<double>* grad,
                         std::size_t loss_from = 0) const override;

  // Parameter layout queries.  Per layer, in order: Wz (hidden x input),
  // Uz (hidden x hidden), bz, Wc, Uc, bc; after the last layer the readout
  // Wo (vocab x hidden) and bo.  All matrices row-major.
  std::size_t off_wz(int layer) const;
  std::size_t off_uz(int layer) const;
  std::size_t off_bz(int layer) const;
  std::size_t off_wc(int layer) const;
  std::size_t off_uc(int layer) const;
  std::size_t off_bc(int layer) const;
  std::size_t off_wo() const;
  std::size_t off_bo() const;
  int input_dim(int layer) const;

 private:
  int hidden_;
  int layers_;
  bool sat_boundary_;
};

// ---------------------------------------------------------------------------
// Scoring helpers
// ---------------------------------------------------------------------------

// Total negative log-likelihood of the sequence in nats (sum over every
// position from loss_from on, end token included; earlier positions only
// condition).  +infinity when the model assigns some scored token
// probability zero.
double seq_nll(const ArModel& model, const TokenString& seq,
               std::size_t loss_from = 0);

// Mean per-token NLL over a corpus (total nats / total tokens).
double corpus_ce(const ArModel& model, const std::vector<TokenString>& corpus);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
  double lr = 0.1;              // > 0
  int batch = 16;               // >= 1 sequences per SGD step
  std::uint64_t seed = 0;       // shuffling
  int early_stop_patience = 3;  // >= 1 epochs without dev improvement
  int max_epochs = 50;          // >= 1
  double momentum = 0.0;        // in [0, 1)

  // When true, parametric (SGD) training treats each sequence as a
  // self-delimiting formula code followed by target tokens: the per-token
  // cross-entropy -- for both the gradient and the dev loss -- covers only
  // the positions from the code's end (sat_target_start), so the model is
  // trained as a conditional generator of the assignment given the formula.
  // Sequences that never complete a code are scored in full.  The trie's
  // counting fit ignores this flag.
  bool conditional = false;
};

struct TrainResult {
  std::vector<double> train_loss;   // per epoch, mean per-token NLL as seen
  std::vector<double> dev_loss;     // per epoch, full dev pass
  std::vector<int> accepted_epochs; // epochs that improved the dev best
  int best_epoch = -1;              // first epoch attaining the minimum
  double best_dev_loss = 0.0;
};

// Trains the model in place and returns the loss record.  Parametric kinds
// run minibatch SGD; the trie kind rebuilds its counts from the train split
// (a single "epoch" whose losses are the exact empirical cross-entropies).
// On return the model carries the parameters of the first checkpoint that
// attained the minimum dev loss.  If the loss ever turns non-finite the
// model is restored to the last stable checkpoint (the end of the previous
// epoch, or the initial parameters) and TrainingError is thrown -- the
// model object is the vehicle that carries that checkpoint back.
// Deterministic: retraining an identically constructed model with the same
// config yields bit-identical parameters.
TrainResult train_ar(ArModel& model, const std::vector<TokenString>& train,
                     const std::vector<TokenString>& dev,
                     const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Perplexities are exp of mean cross-entropies in nats; every field is
// >= 1 by construction (probabilities never exceed 1).
//
//  * token_ppl          -- full-vocabulary NLL over every position of every
//                          sequence, end token included.
//  * enumeration_ppl    -- at each example's satisfiability-indicator
//                          position, the model's binary conditional
//                          (renormalized over {0,1}) against the realized
//                          indicator bit.
//  * enumeration_ppl_oracle -- same position and renormalization, but the
//                          cross-entropy is taken against the exact oracle
//                          distribution (1/(s+1), s/(s+1)) where s counts
//                          the formula's satisfying assignments.  Reported
//                          separately from the realized-bit figure above;
//                          the two answer different questions.
//  * assignment_ppl     -- over satisfiable examples only: the renormalized
//                          binary conditionals against the realized
//                          satisfier bits that follow the indicator.
struct EvalReport {
  double token_ppl = 1.0;
  double enumeration_ppl = 1.0;
  double enumeration_ppl_oracle = 1.0;
  double assignment_ppl = 1.0;
  long n_examples = 0;
  long n_satisfiable = 0;
};

// Scores every example; throws ArgumentError on an empty list.  `threads`
// parallelizes the pure scoring pass; results are reduced in example order
// so the report does not depend on the thread count.
EvalReport evaluate_ar(const ArModel& model, const std::vector<Example>& examples,
                       int threads = 1);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct SampleResult {
  TokenString tokens;      // emitted tokens, end token excluded
  bool truncated = false;  // true when max_len fired before the end token
};

// Ancestral sampling until the end token or max_len tokens.
SampleResult sample_ar(const ArModel& model, Rng& rng, std::size_t max_len);

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

// Versioned checkpoint: one JSON metadata line ("satlab-ar-v1", kind,
// shapes, and the caller's meta map) followed by the raw parameter doubles
// (or the trie's node table).  load_ar reconstructs the exact model;
// malformed files raise ParseError, truncated ones IoError.
void save_ar(const ArModel& model, const std::string& path,
             const std::map<std::string, std::string>& meta = {});
std::unique_ptr<ArModel> load_ar(
    const std::string& path,
    std::map<std::string, std::string>* meta_out = nullptr);

}  // namespace satlang
