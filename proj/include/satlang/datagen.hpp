// datagen.hpp -- hard random 3-SAT corpus generation at the phase-transition
// clause density, with satisfying-assignment targets and on-disk splits.
//
// Formulas are drawn uniformly: every clause picks 3 distinct variables
// without replacement and an independent uniform sign per literal; duplicate
// clauses are allowed.  A draw that leaves some variable unused is resampled
// (an unused variable would not survive the text round-trip, which infers
// the variable count from the clauses), and the accepted formula is
// canonicalized so that variable use counts are non-increasing in the index.
//
// On disk, one example per line: `dimacs TAB assignment-bits-or-"UNSAT"`.
// The assignment column holds a satisfying assignment of add_one(formula):
// a leading 1 followed by a satisfier of the formula itself, or the literal
// marker UNSAT (standing for the all-zeros assignment, which satisfies
// add_one(f) vacuously).  Everything is deterministic under the spec seed:
// formula i of variable count v uses derive_seed(seed, v, i), so generation
// parallelized over variable counts is byte-identical to the serial run.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "satlang/bits.hpp"
#include "satlang/dimacs.hpp"
#include "satlang/errors.hpp"
#include "satlang/rational.hpp"

namespace satlang {

// The empirical hard-instance density for random 3-SAT.
inline const Rat kDefaultAlpha = Rat(42667, 10000);

// floor(alpha * vars).  Throws ArgumentError unless alpha > 0 and vars >= 0.
int clause_count_for(int vars, const Rat& alpha = kDefaultAlpha);

// One uniform hard formula: exactly clause_count_for(vars, alpha) clauses,
// all variables used, canonicalized by use count.  Deterministic under
// (vars, seed, alpha).  Throws ArgumentError if vars < 3 or if the density
// is too low to ever use every variable.
Cnf3 gen_hard3sat(int vars, std::uint64_t seed, const Rat& alpha = kDefaultAlpha);

// Relabels variables so use counts are non-increasing in the new index
// (ties keep the original relative order).  Exposed for tests.
Cnf3 canonicalize_by_use(const Cnf3& f);

struct Example {
  Cnf3 formula;          // canonical: use counts non-increasing
  Bit target_prefix = 0; // 1 iff the formula is satisfiable
  BitString assignment;  // length var_count+1; satisfies add_one(formula)
};

// Decides satisfiability exhaustively (word-parallel over assignments) and
// attaches the lexicographically smallest satisfier, or the all-zeros
// fallback when none exists.
Example make_example(const Cnf3& f);

// One-line TSV form (no trailing newline) and its inverse.  Parsing
// validates the assignment against the formula and throws ParseError on any
// malformed or inconsistent line.
std::string example_line(const Example& e);
Example parse_example_line(const std::string& line);

struct SplitCounts {
  int train = 0, dev = 0, test = 0;
};

// Largest-share split: floor(total * part / sum) each, remainder handed to
// train, then dev, then test.  Ratio parts must be positive.
SplitCounts split_counts(int total, const std::array<int, 3>& ratio);

struct CorpusSpec {
  std::vector<int> var_counts;       // e.g. 6..14
  int formulas_per_count = 1020;     // desk scale
  std::array<int, 3> split_ratio{100, 1, 1};
  std::uint64_t seed = 0;
  Rat alpha = kDefaultAlpha;
};

struct CountSummary {
  int var_count = 0;
  int clauses = 0;        // clause_count_for(var_count, alpha)
  int satisfiable = 0;    // across all splits
  SplitCounts splits;
  std::string train_file, dev_file, test_file;  // paths as written
};

struct CorpusSummary {
  std::vector<CountSummary> counts;
  std::string manifest_file;
};

// Generates and writes the corpus: three TSV files per variable count named
// vars<N>.{train,dev,test}.tsv plus manifest.json, all under out_dir.
// Generation may run on `threads` workers (one variable count at a time per
// worker); the bytes written are identical for every thread count.  Throws
// ArgumentError for invalid specs (duplicate var counts, nonpositive ratio
// parts, alpha <= 0, vars < 3) and IoError with path context on I/O failure.
CorpusSummary build_corpus(const CorpusSpec& spec, const std::string& out_dir,
                           int threads = 1);

// Reads one TSV corpus file back into memory.  Throws IoError if the file
// cannot be read and ParseError (with the offending line appended to the
// message) on malformed content.
std::vector<Example> load_examples(const std::string& path);

}  // namespace satlang
