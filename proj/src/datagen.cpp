// datagen.cpp -- corpus generation, TSV codec, and manifest writing.

#include "satlang/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "json.hpp"
#include "satlang/formula.hpp"
#include "satlang/rng.hpp"

namespace satlang {

int clause_count_for(int vars, const Rat& alpha) {
  if (vars < 0) throw ArgumentError("variable count must be nonnegative");
  if (alpha <= 0) throw ArgumentError("clause density must be positive");
  Rat prod = alpha * vars;
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), prod.get_num_mpz_t(), prod.get_den_mpz_t());
  return static_cast<int>(q.get_si());
}

Cnf3 canonicalize_by_use(const Cnf3& f) {
  std::vector<long> uses(static_cast<std::size_t>(f.var_count) + 1, 0);
  for (const auto& clause : f.clauses)
    for (int lit : clause) ++uses[static_cast<std::size_t>(std::abs(lit))];

  std::vector<int> order(static_cast<std::size_t>(f.var_count));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return uses[static_cast<std::size_t>(a)] > uses[static_cast<std::size_t>(b)];
  });
  std::vector<int> rename(static_cast<std::size_t>(f.var_count) + 1, 0);
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    rename[static_cast<std::size_t>(order[rank])] = static_cast<int>(rank) + 1;

  Cnf3 out;
  out.var_count = f.var_count;
  out.clauses.reserve(f.clauses.size());
  for (const auto& clause : f.clauses) {
    std::vector<int> renamed;
    renamed.reserve(clause.size());
    for (int lit : clause) {
      int v = rename[static_cast<std::size_t>(std::abs(lit))];
      renamed.push_back(lit < 0 ? -v : v);
    }
    out.clauses.push_back(std::move(renamed));
  }
  return out;
}

Cnf3 gen_hard3sat(int vars, std::uint64_t seed, const Rat& alpha) {
  if (vars < 3) throw ArgumentError("hard 3-SAT generation needs vars >= 3");
  int clause_count = clause_count_for(vars, alpha);
  if (3 * clause_count < vars)
    throw ArgumentError(
        "clause density too low to ever use every variable");

  Rng rng(seed);
  Cnf3 f;
  f.var_count = vars;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    f.clauses.clear();
    std::vector<char> used(static_cast<std::size_t>(vars) + 1, 0);
    for (int c = 0; c < clause_count; ++c) {
      int v1 = 1 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(vars)));
      int v2 = v1;
      while (v2 == v1)
        v2 = 1 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(vars)));
      int v3 = v1;
      while (v3 == v1 || v3 == v2)
        v3 = 1 + static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(vars)));
      std::vector<int> clause;
      for (int v : {v1, v2, v3}) {
        used[static_cast<std::size_t>(v)] = 1;
        clause.push_back(rand_bit(rng) ? -v : v);
      }
      f.clauses.push_back(std::move(clause));
    }
    bool all_used = true;
    for (int v = 1; v <= vars; ++v) all_used = all_used && used[static_cast<std::size_t>(v)];
    if (all_used) return canonicalize_by_use(f);
  }
  throw ArgumentError(
      "could not draw a formula using every variable at this density");
}

Example make_example(const Cnf3& f) {
  Formula phi = cnf3_to_formula(f);
  Example e;
  e.formula = f;
  if (auto a = first_satisfier(phi)) {
    e.target_prefix = 1;
    e.assignment.push_back(1);
    e.assignment.insert(e.assignment.end(), a->begin(), a->end());
  } else {
    e.target_prefix = 0;
    e.assignment.assign(static_cast<std::size_t>(f.var_count) + 1, 0);
  }
  return e;
}

std::string example_line(const Example& e) {
  std::string out = dimacs_encode(e.formula);
  out += '\t';
  if (e.target_prefix == 1)
    out += bits_to_string(e.assignment);
  else
    out += "UNSAT";
  return out;
}

Example parse_example_line(const std::string& line) {
  std::size_t tab = line.find('\t');
  if (tab == std::string::npos)
    throw ParseError("example line lacks a tab separator", 0);
  if (line.find('\t', tab + 1) != std::string::npos)
    throw ParseError("example line has more than one tab", tab + 1);

  Example e;
  e.formula = dimacs_decode(line.substr(0, tab));
  std::size_t j = static_cast<std::size_t>(e.formula.var_count);
  std::string payload = line.substr(tab + 1);
  if (payload == "UNSAT") {
    e.target_prefix = 0;
    e.assignment.assign(j + 1, 0);
    return e;
  }
  e.assignment = bits_from_string(payload);
  if (e.assignment.size() != j + 1)
    throw ParseError("assignment length must be var count + 1", tab + 1);
  e.target_prefix = e.assignment.front();
  if (e.target_prefix == 1) {
    BitString suffix(e.assignment.begin() + 1, e.assignment.end());
    if (!cnf3_evaluate(e.formula, suffix))
      throw ParseError("assignment does not satisfy the formula", tab + 1);
  } else {
    for (Bit b : e.assignment)
      if (b != 0)
        throw ParseError("zero-prefixed assignment must be all zeros",
                         tab + 1);
  }
  return e;
}

SplitCounts split_counts(int total, const std::array<int, 3>& ratio) {
  if (total < 0) throw ArgumentError("split total must be nonnegative");
  for (int part : ratio)
    if (part <= 0) throw ArgumentError("split ratio parts must be positive");
  long long sum = static_cast<long long>(ratio[0]) + ratio[1] + ratio[2];
  SplitCounts out;
  out.train = static_cast<int>(static_cast<long long>(total) * ratio[0] / sum);
  out.dev = static_cast<int>(static_cast<long long>(total) * ratio[1] / sum);
  out.test = static_cast<int>(static_cast<long long>(total) * ratio[2] / sum);
  int rem = total - out.train - out.dev - out.test;
  int* slots[3] = {&out.train, &out.dev, &out.test};
  for (int i = 0; rem > 0; ++i, --rem) *slots[i % 3] += 1;
  return out;
}

namespace {

struct CountBatch {
  CountSummary summary;
  std::vector<Example> examples;
};

CountBatch generate_count(const CorpusSpec& spec, int var_count) {
  CountBatch batch;
  batch.summary.var_count = var_count;
  batch.summary.clauses = clause_count_for(var_count, spec.alpha);
  batch.summary.splits = split_counts(spec.formulas_per_count, spec.split_ratio);
  batch.examples.reserve(static_cast<std::size_t>(spec.formulas_per_count));
  for (int i = 0; i < spec.formulas_per_count; ++i) {
    std::uint64_t s = derive_seed(spec.seed, static_cast<std::uint64_t>(var_count),
                                  static_cast<std::uint64_t>(i));
    Example e = make_example(gen_hard3sat(var_count, s, spec.alpha));
    if (e.target_prefix == 1) ++batch.summary.satisfiable;
    batch.examples.push_back(std::move(e));
  }
  return batch;
}

void write_lines(const std::string& path,
                 const std::vector<Example>& examples, std::size_t begin,
                 std::size_t end) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open corpus file for writing", path);
  for (std::size_t i = begin; i < end; ++i)
    out << example_line(examples[i]) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing corpus file", path);
}

}  // namespace

CorpusSummary build_corpus(const CorpusSpec& spec, const std::string& out_dir,
                           int threads) {
  if (threads < 1) throw ArgumentError("thread count must be positive");
  if (spec.formulas_per_count < 0)
    throw ArgumentError("formulas_per_count must be nonnegative");
  {
    std::vector<int> sorted = spec.var_counts;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ArgumentError("duplicate variable counts in the corpus spec");
  }
  // Fail fast on invalid parameters before spawning workers.
  for (int v : spec.var_counts) {
    if (v < 3) throw ArgumentError("hard 3-SAT generation needs vars >= 3");
    (void)clause_count_for(v, spec.alpha);
  }
  (void)split_counts(spec.formulas_per_count, spec.split_ratio);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create corpus directory", out_dir);

  // Generate (possibly in parallel; per-formula seeds make the result
  // independent of scheduling), then write everything sequentially.
  std::vector<CountBatch> batches(spec.var_counts.size());
  {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= spec.var_counts.size()) return;
        try {
          batches[i] = generate_count(spec, spec.var_counts[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::size_t worker_count = std::min<std::size_t>(
        static_cast<std::size_t>(threads), std::max<std::size_t>(spec.var_counts.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < worker_count; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  CorpusSummary summary;
  nlohmann::json manifest;
  manifest["format"] = "dimacs TAB assignment-bits-or-UNSAT";
  manifest["alpha"] = rat_str(spec.alpha);
  manifest["seed"] = spec.seed;
  manifest["formulas_per_count"] = spec.formulas_per_count;
  manifest["split_ratio"] = spec.split_ratio;
  manifest["var_counts"] = spec.var_counts;
  nlohmann::json per_count = nlohmann::json::object();

  for (CountBatch& batch : batches) {
    CountSummary& cs = batch.summary;
    std::filesystem::path dir(out_dir);
    std::string stem = "vars" + std::to_string(cs.var_count);
    cs.train_file = (dir / (stem + ".train.tsv")).string();
    cs.dev_file = (dir / (stem + ".dev.tsv")).string();
    cs.test_file = (dir / (stem + ".test.tsv")).string();
    std::size_t train_end = static_cast<std::size_t>(cs.splits.train);
    std::size_t dev_end = train_end + static_cast<std::size_t>(cs.splits.dev);
    write_lines(cs.train_file, batch.examples, 0, train_end);
    write_lines(cs.dev_file, batch.examples, train_end, dev_end);
    write_lines(cs.test_file, batch.examples, dev_end, batch.examples.size());

    nlohmann::json entry;
    entry["clauses"] = cs.clauses;
    entry["satisfiable"] = cs.satisfiable;
    entry["splits"] = {{"train", cs.splits.train},
                       {"dev", cs.splits.dev},
                       {"test", cs.splits.test}};
    entry["files"] = {{"train", stem + ".train.tsv"},
                      {"dev", stem + ".dev.tsv"},
                      {"test", stem + ".test.tsv"}};
    per_count[std::to_string(cs.var_count)] = std::move(entry);
    summary.counts.push_back(cs);
  }
  manifest["counts"] = std::move(per_count);

  summary.manifest_file =
      (std::filesystem::path(out_dir) / "manifest.json").string();
  std::ofstream mf(summary.manifest_file, std::ios::binary);
  if (!mf) throw IoError("cannot open manifest for writing", summary.manifest_file);
  mf << manifest.dump(2) << '\n';
  mf.flush();
  if (!mf) throw IoError("failed writing manifest", summary.manifest_file);
  return summary;
}

std::vector<Example> load_examples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file", path);
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_example_line(line));
    } catch (const ParseError& p) {
      throw ParseError("malformed example (" + std::string(p.what()) +
                           ") in " + path + " line " + std::to_string(line_no),
                       p.position());
    }
  }
  if (in.bad()) throw IoError("failed reading corpus file", path);
  return out;
}

}  // namespace satlang
