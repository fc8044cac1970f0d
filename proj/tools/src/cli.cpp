#include "subkb/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "csv.hpp"
#include "manifest.hpp"
#include "ranges.hpp"
#include "subkb/analogy.hpp"
#include "subkb/corpus.hpp"
#include "subkb/embedding.hpp"
#include "subkb/errors.hpp"
#include "subkb/kb_extend.hpp"
#include "subkb/parallel.hpp"
#include "subkb/sn_trainer.hpp"
#include "subkb/subspace.hpp"
#include "subkb/vector_fit.hpp"
#include "subkb/word_sets.hpp"

namespace subkb::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kModule = "cli";

const std::set<std::string> kInputOptions = {"--corpus", "--cooc", "--vocab", "--vectors",
                                             "--category", "--relation", "--tags"};

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> argv;
};

class OutputFile {
 public:
  explicit OutputFile(const fs::path& path) : path_(path), file_(path, std::ios::binary) {
    if (!file_) throw IoError(kModule, "cannot open '" + path.string() + "' for writing");
  }
  std::ostream& stream() { return file_; }
  void close() {
    file_.close();
    if (!file_) throw IoError(kModule, "failed writing '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream file_;
};

void report_load(Context& ctx, const LoadReport& report, const std::string& path) {
  for (const auto& w : report.warnings()) {
    ctx.err << "warning: word_sets: " << w << " entries in '" << path << "'\n";
  }
}

class Command {
 public:
  virtual ~Command() = default;
  virtual std::string name() const = 0;
  virtual std::string summary() const = 0;

  void bind(CLI::App& sub) {
    sub_ = &sub;
    options(sub);
    sub.add_option("--threads", threads_, "Worker threads (default: $SUBSPACE_KB_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  }

  virtual int run(Context& ctx) = 0;

 protected:
  virtual void options(CLI::App& sub) = 0;

  int threads() const { return threads_ > 0 ? threads_ : default_thread_count(); }

  /// Writes `body` to `path`, or to stdout when `path` is empty. File output
  /// gets a manifest.
  void emit(Context& ctx, const std::string& path, const std::function<void(std::ostream&)>& body,
            std::vector<std::string> extra_outputs = {}) {
    if (path.empty()) {
      body(ctx.out);
      return;
    }
    OutputFile file(path);
    body(file.stream());
    file.close();
    extra_outputs.insert(extra_outputs.begin(), path);
    record(ctx, extra_outputs);
  }

  /// Writes the manifest of this run next to outputs[0].
  void record(Context& ctx, const std::vector<std::string>& outputs,
              const std::vector<std::pair<std::string, std::string>>& implicit_inputs = {}) {
    RunManifest m;
    m.command = name();
    m.argv = ctx.argv;
    m.cwd = fs::current_path().string();
    m.threads = threads();
    m.timestamp = utc_timestamp();
    m.outputs = outputs;
    for (const CLI::Option* opt : sub_->get_options()) {
      const std::string key = opt->get_name();
      if (key == "--help") continue;
      std::string value;
      if (opt->get_type_size_max() == 0) {
        value = opt->count() > 0 ? "true" : "false";
      } else if (opt->count() > 0) {
        const auto& res = opt->results();
        for (std::size_t i = 0; i < res.size(); ++i) value += (i ? " " : "") + res[i];
      } else {
        value = opt->get_default_str();
      }
      m.parameters[key] = value;
      if (key == "--seed" && opt->count() > 0) m.seed = std::stoull(opt->results().front());
      if (kInputOptions.count(key) && opt->count() > 0) {
        m.inputs.push_back({key, opt->results().front(), sha256_file(opt->results().front())});
      }
    }
    if (!m.seed && m.parameters.count("--seed")) m.seed = std::stoull(m.parameters["--seed"]);
    for (const auto& [option, path] : implicit_inputs) m.inputs.push_back({option, path, sha256_file(path)});
    save_manifest(m, manifest_path_for(outputs.front()));
  }

  CLI::App* sub_ = nullptr;

 private:
  int threads_ = 0;
};

// Category or relation given through mutually exclusive options.
struct SetSource {
  std::string category;
  std::string relation;

  void add(CLI::App& sub) {
    auto* c = sub.add_option("--category", category, "Category file (one word per line)");
    auto* r = sub.add_option("--relation", relation, "Relation file (two words per line)");
    c->excludes(r);
    r->excludes(c);
  }

  Eigen::MatrixXd vectors(Context& ctx, const EmbeddingSet& emb, std::string* set_name) const {
    LoadReport report;
    if (!category.empty()) {
      const auto set = load_category(category, known_in(emb), &report);
      report_load(ctx, report, category);
      *set_name = set.name;
      return category_vectors(set, emb);
    }
    if (!relation.empty()) {
      const auto set = load_relation(relation, known_in(emb), &report);
      report_load(ctx, report, relation);
      *set_name = set.name;
      return relation_vectors(set, emb);
    }
    throw ContractError(kModule, "one of --category or --relation is required");
  }
};

class CountCommand : public Command {
 public:
  std::string name() const override { return "count"; }
  std::string summary() const override { return "Build the vocabulary and co-occurrence counts of a corpus"; }

  void options(CLI::App& sub) override {
    sub.add_option("--corpus", corpus_, "Whitespace-tokenized text corpus")->required();
    sub.add_option("--min-count", min_count_, "Minimum token count m0")->capture_default_str();
    sub.add_option("--window", window_, "Window half-width k")->capture_default_str();
    sub.add_option("--out", out_, "COOC output; the vocabulary goes to <out>.vocab")->required();
  }

  int run(Context& ctx) override {
    const auto vocab = build_vocabulary(corpus_, min_count_);
    const auto cooc = count_cooccurrences(corpus_, vocab, {window_, threads()});
    save_cooccurrences(cooc, out_);
    save_vocabulary(vocab, out_ + ".vocab");
    record(ctx, {out_, out_ + ".vocab"});
    ctx.err << "count: " << vocab.size() << " words, " << cooc.nonzeros() << " stored cells\n";
    return 0;
  }

 private:
  std::string corpus_;
  std::string out_;
  std::uint64_t min_count_ = 5;
  int window_ = 10;
};

class TrainCommand : public Command {
 public:
  std::string name() const override { return "train"; }
  std::string summary() const override { return "Train squared-norm word vectors"; }

  void options(CLI::App& sub) override {
    sub.add_option("--cooc", cooc_, "COOC file")->required();
    sub.add_option("--vocab", vocab_, "Vocabulary file (default: <cooc>.vocab)");
    sub.add_option("--dim", cfg_.dim, "Vector dimension")->capture_default_str();
    sub.add_option("--lr", cfg_.learning_rate, "Adagrad learning rate")->capture_default_str();
    sub.add_option("--epochs", cfg_.epochs, "Training epochs")->capture_default_str();
    sub.add_option("--seed", cfg_.seed, "Random seed")->capture_default_str();
    sub.add_option("--x-max", cfg_.x_max, "Weight cutoff x_max")->capture_default_str();
    sub.add_option("--alpha", cfg_.alpha, "Weight exponent")->capture_default_str();
    sub.add_option("--out", out_, "Vector file output")->required();
  }

  int run(Context& ctx) override {
    const auto cooc = load_cooccurrences(cooc_);
    const std::string vocab_path = vocab_.empty() ? cooc_ + ".vocab" : vocab_;
    const auto vocab = load_vocabulary(vocab_path);
    cfg_.threads = threads();
    TrainStats stats;
    const auto emb = train_sn(vocab, cooc, cfg_, &stats);
    save_vectors(emb, out_);
    std::vector<std::pair<std::string, std::string>> implicit;
    if (vocab_.empty()) implicit.emplace_back("--vocab", vocab_path);
    record(ctx, {out_}, implicit);
    ctx.err << "train: loss " << format_real(stats.initial_loss) << " -> " << format_real(stats.final_loss)
            << '\n';
    return 0;
  }

 private:
  std::string cooc_;
  std::string vocab_;
  std::string out_;
  TrainConfig cfg_;
};

class BasisCommand : public Command {
 public:
  std::string name() const override { return "basis"; }
  std::string summary() const override { return "Rank-k basis of a category or relation"; }

  void options(CLI::App& sub) override {
    sub.add_option("--vectors", vectors_, "Vector file")->required();
    source_.add(sub);
    sub.add_option("--rank", rank_, "Basis rank k")->capture_default_str();
    sub.add_option("--out", out_, "CSV output (default: stdout)");
  }

  int run(Context& ctx) override {
    const auto emb = load_vectors(vectors_);
    std::string set_name;
    const auto basis = get_basis(source_.vectors(ctx, emb, &set_name), rank_);
    if (!basis.sign_fixed) ctx.err << "warning: subspace: orientation of u1 undetermined for '" << set_name << "'\n";
    emit(ctx, out_, [&](std::ostream& os) {
      CsvWriter csv(os);
      std::vector<std::string> header{"direction", "singular_value"};
      for (int i = 1; i <= basis.dim(); ++i) header.push_back("x" + std::to_string(i));
      csv.row(header);
      for (int k = 0; k < basis.rank(); ++k) {
        std::vector<std::string> row{std::to_string(k + 1), format_real(basis.singular_values(k))};
        for (int i = 0; i < basis.dim(); ++i) row.push_back(format_real(basis.u(i, k)));
        csv.row(row);
      }
    });
    return 0;
  }

 private:
  std::string vectors_;
  std::string out_;
  SetSource source_;
  int rank_ = 3;
};

class ExtendCategoryCommand : public Command {
 public:
  std::string name() const override { return "extend-category"; }
  std::string summary() const override { return "Propose new members of a category"; }

  void options(CLI::App& sub) override {
    sub.add_option("--vectors", vectors_, "Vector file")->required();
    sub.add_option("--category", category_, "Category file")->required();
    sub.add_option("--rank", rank_, "Basis rank k")->capture_default_str();
    sub.add_option("--delta", delta_, "Projection threshold")->capture_default_str();
    sub.add_option("--top", top_, "Keep the best N candidates (0: all)")->capture_default_str();
    sub.add_option("--out", out_, "CSV output (default: stdout)");
  }

  int run(Context& ctx) override {
    const auto emb = load_vectors(vectors_);
    LoadReport report;
    const auto set = load_category(category_, known_in(emb), &report);
    report_load(ctx, report, category_);
    const auto ext = extend_category(set, emb, rank_, delta_);
    const std::size_t n = top_ > 0 ? std::min(top_, ext.items.size()) : ext.items.size();
    emit(ctx, out_, [&](std::ostream& os) {
      CsvWriter csv(os);
      csv.line("item", "projection");
      for (std::size_t i = 0; i < n; ++i) csv.line(ext.items[i].word, ext.items[i].projection);
    });
    return 0;
  }

 private:
  std::string vectors_;
  std::string category_;
  std::string out_;
  int rank_ = 3;
  double delta_ = 0.5;
  std::size_t top_ = 0;
};

std::vector<int> three_ints(const std::string& text, const char* option) {
  const auto v = parse_int_list(text);
  if (v.size() != 3) throw ContractError(kModule, std::string(option) + " needs three values kA,kB,kr");
  return v;
}

std::vector<double> three_reals(const std::string& text, const char* option) {
  const auto v = parse_real_list(text);
  if (v.size() != 3) throw ContractError(kModule, std::string(option) + " needs three values dA,dB,dr");
  return v;
}

class ExtendRelationCommand : public Command {
 public:
  std::string name() const override { return "extend-relation"; }
  std::string summary() const override { return "Propose new pairs of a relation"; }

  void options(CLI::App& sub) override {
    sub.add_option("--vectors", vectors_, "Vector file")->required();
    sub.add_option("--relation", relation_, "Relation file")->required();
    sub.add_option("--ranks", ranks_, "Ranks kA,kB,kr")->capture_default_str();
    sub.add_option("--deltas", deltas_, "Thresholds dA,dB,dr")->capture_default_str();
    sub.add_option("--max-pairs", max_pairs_, "Refuse larger candidate cross products")->capture_default_str();
    sub.add_option("--top", top_, "Keep the best N pairs (0: all)")->capture_default_str();
    sub.add_option("--out", out_, "CSV output (default: stdout)");
  }

  int run(Context& ctx) override {
    const auto ranks = three_ints(ranks_, "--ranks");
    const auto deltas = three_reals(deltas_, "--deltas");
    const auto emb = load_vectors(vectors_);
    LoadReport report;
    const auto set = load_relation(relation_, known_in(emb), &report);
    report_load(ctx, report, relation_);
    RelationExtendConfig cfg;
    cfg.rank_left = ranks[0];
    cfg.rank_right = ranks[1];
    cfg.rank_relation = ranks[2];
    cfg.delta_left = deltas[0];
    cfg.delta_right = deltas[1];
    cfg.delta_relation = deltas[2];
    cfg.max_candidate_pairs = max_pairs_;
    const auto ext = extend_relation(set, emb, cfg);
    const std::size_t n = top_ > 0 ? std::min(top_, ext.items.size()) : ext.items.size();
    emit(ctx, out_, [&](std::ostream& os) {
      CsvWriter csv(os);
      csv.line("a", "b", "projection");
      for (std::size_t i = 0; i < n; ++i) csv.line(ext.items[i].a, ext.items[i].b, ext.items[i].projection);
    });
    return 0;
  }

 private:
  std::string vectors_;
  std::string relation_;
  std::string out_;
  std::string ranks_ = "3,3,3";
  std::string deltas_ = "0.5,0.5,0.5";
  std::size_t max_pairs_ = 10'000'000;
  std::size_t top_ = 0;
};

class RelationExperimentCommand : public Command {
 public:
  std::string name() const override { return "relation-experiment"; }
  std::string summary() const override { return "Cross-validated accuracy of relation extension"; }

  void options(CLI::App& sub) override {
    sub.add_option("--vectors", vectors_, "Vector file")->required();
    sub.add_option("--relation", relation_, "Relation file")->required();
    sub.add_option("--ranks", ranks_, "Ranks, e.g. 1..9")->capture_default_str();
    sub.add_option("--deltas", deltas_, "Thresholds, e.g. 0.4:0.05:0.75")->capture_default_str();
    sub.add_option("--trials", cfg_.trials, "Random splits")->capture_default_str();
    sub.add_option("--train-fraction", cfg_.train_fraction, "Share of pairs used for training")
        ->capture_default_str();
    sub.add_option("--max-pairs", cfg_.max_candidate_pairs, "Refuse larger candidate cross products")
        ->capture_default_str();
    sub.add_option("--seed", cfg_.seed, "Random seed")->capture_default_str();
    sub.add_option("--out", out_, "CSV output (default: stdout)");
  }

  int run(Context& ctx) override {
    cfg_.ranks = parse_int_list(ranks_);
    cfg_.deltas = parse_real_list(deltas_);
    cfg_.threads = threads();
    const auto emb = load_vectors(vectors_);
    LoadReport report;
    const auto set = load_relation(relation_, known_in(emb), &report);
    report_load(ctx, report, relation_);
    const auto result = relation_accuracy_experiment(set, emb, cfg_);
    emit(ctx, out_, [&](std::ostream& os) {
      CsvWriter csv(os);
      csv.line("rank", "delta", "mean_accuracy", "scored_trials", "empty_trials", "correct", "incorrect");
      for (const auto& r : result.rows) {
        csv.line(r.rank, r.delta, r.mean_accuracy, r.scored_trials, r.empty_trials, r.correct, r.incorrect);
      }
    });
    return 0;
  }

 private:
  std::string vectors_;
  std::string relation_;
  std::string out_;
  std::string ranks_ = "1..9";
  std::string deltas_ = "0.4:0.05:0.75";
  RelationExperimentConfig cfg_;
};

class CaptureExperimentCommand : public Command {
 public:
  std::string name() const override { return "capture-experiment"; }
  std::string summary() const override { return "Cross-validated capture rate of a set's subspace"; }

  void options(CLI::App& sub) override {
    sub.add_option("--vectors", vectors_, "Vector file")->required();
    source_.add(sub);
    sub.add_option("--ranks", ranks_, "Ranks, e.g. 1..10")->capture_default_str();
    sub.add_option("--trials", cfg_.trials, "Random splits")->capture_default_str();
    sub.add_option("--train-fraction", cfg_.train_fraction, "Share of members used for training")
        ->capture_default_str();
    sub.add_option("--min-size", cfg_.min_size, "Sets must have more members than this")->capture_default_str();
    sub.add_option("--seed", cfg_.seed, "Random seed")->capture_default_str();
    sub.add_option("--out", out_, "CSV output (default: stdout)");
    sub.add_option("--directions", directions_, "CSV of held-out dot products per basis direction");
  }

  int run(Context& ctx) override {
    cfg_.ranks = parse_int_list(ranks_);
    cfg_.threads = threads();
    const auto emb = load_vectors(vectors_);
    std::string set_name;
    const auto vectors = source_.vectors(ctx, emb, &set_name);
    const auto result = cv_capture_experiment(vectors, set_name, cfg_);
    if (!directions_.empty()) {
      OutputFile file(directions_);
      CsvWriter csv(file.stream());
      csv.line("direction", "dot");
      for (std::size_t i = 0; i < result.directions.size(); ++i) {
        for (double x : result.directions[i]) csv.line(i + 1, x);
      }
      file.close();
    }
    std::vector<std::string> extra;
    if (!directions_.empty()) extra.push_back(directions_);
    emit(
        ctx, out_,
        [&](std::ostream& os) {
          CsvWriter csv(os);
          csv.line("rank", "mean_capture", "stddev");
          for (const auto& r : result.rows) csv.line(r.rank, r.mean, r.stddev);
        },
        extra);
    return 0;
  }

 private:
  std::string vectors_;
  std::string out_;
  std::string directions_;
  std::string ranks_ = "1..10";
  SetSource source_;
  CaptureExperimentConfig cfg_;
};

class LearnVectorCommand : public Command {
 public:
  std::string name() const override { return "learn-vector"; }
  std::string summary() const override { return "Fit a word vector from a small corpus and its category"; }

  void options(CLI::App& sub) override {
    sub.add_option("--vectors", vectors_, "Vector file")->required();
    sub.add_option("--word", word_, "Target word")->required();
    sub.add_option("--category", category_, "Category of the target")->required();
    sub.add_option("--corpus", corpus_, "Small corpus")->required();
    sub.add_option("--rank", cfg_.rank, "Basis rank k")->capture_default_str();
    sub.add_option("--lr", cfg_.learning_rate, "Adagrad learning rate")->capture_default_str();
    sub.add_option("--lambda", cfg_.lambda, "Subspace regularization weight")->capture_default_str();
    sub.add_option("--epochs", cfg_.epochs, "Training epochs")->capture_default_str();
    sub.add_option("--seed", cfg_.seed, "Random seed")->capture_default_str();
    sub.add_option("--min-count", cfg_.min_count, "Minimum count in the small corpus")->capture_default_str();
    sub.add_option("--window", cfg_.window, "Window half-width")->capture_default_str();
    sub.add_flag("--withhold", withhold_, "Evaluate against the target's existing vector");
    sub.add_option("--out", out_, "Output (default: stdout)");
  }

  int run(Context& ctx) override {
    const auto emb = load_vectors(vectors_);
    if (withhold_ && !emb.contains(word_)) {
      throw ContractError(kModule, "--withhold needs an existing vector for '" + word_ + "'");
    }
    LoadReport report;
    const auto set = load_category(category_, known_in(emb), &report);
    report_load(ctx, report, category_);
    const auto fit = learn_vector(word_, set, corpus_, emb, cfg_);
    emit(ctx, out_, [&](std::ostream& os) {
      write_vector_line(os, word_, fit.vector);
      if (withhold_) {
        const auto oc = order_and_cosine(fit.vector, word_, emb);
        CsvWriter csv(os);
        csv.line("order", "cosine", "Y_total");
        csv.line(oc.order, oc.cosine, fit.total_cooccurrence);
      }
    });
    return 0;
  }

 private:
  std::string vectors_;
  std::string word_;
  std::string category_;
  std::string corpus_;
  std::string out_;
  bool withhold_ = false;
  FitConfig cfg_;
};

class AnalogyCommand : public Command {
 public:
  std::string name() const override { return "analogy"; }
  std::string summary() const override { return "Solve a:b::c:?? by vector offset"; }

  void options(CLI::App& sub) override {
    sub.add_option("--vectors", vectors_, "Vector file")->required();
    sub.add_option("words", words_, "a b c")->expected(3)->required();
    sub.add_option("--n", n_, "Answers to list")->capture_default_str();
    sub.add_option("--filter", filter_, "Candidate filter: none, pos or lex")
        ->check(CLI::IsMember({"none", "pos", "lex"}))
        ->capture_default_str();
    sub.add_option("--tags", tags_, "Tag table (needed by pos and lex filters)");
    sub.add_flag("--include-query-words", query_.include_query_words, "Keep a, b and c as candidates");
  }

  int run(Context& ctx) override {
    const auto mode = parse_filter_mode(filter_);
    if (mode != FilterMode::kNone && tags_.empty()) throw ContractError(kModule, "--filter " + filter_ + " needs --tags");
    const auto emb = load_vectors(vectors_);
    std::vector<WordId> pool;
    if (mode == FilterMode::kNone) {
      pool = filter_candidates(words_[1], mode, TagTable{}, emb).candidates;
    } else {
      const auto tags = load_tags(tags_);
      auto filtered = filter_candidates(words_[1], mode, tags, emb);
      if (filtered.missing_entry) {
        throw ContractError("analogy", "'" + words_[1] + "' has no entry in '" + tags_ + "'");
      }
      pool = std::move(filtered.candidates);
    }
    const auto answers = solve_query(words_[0], words_[1], words_[2], pool, n_, emb, query_);
    CsvWriter csv(ctx.out);
    csv.line("word", "cosine");
    for (const auto& a : answers) csv.line(emb.word(a.id), a.cosine);
    return 0;
  }

 private:
  std::string vectors_;
  std::vector<std::string> words_;
  std::size_t n_ = 10;
  std::string filter_ = "none";
  std::string tags_;
  QueryOptions query_;
};

class AnalogyBenchmarkCommand : public Command {
 public:
  std::string name() const override { return "analogy-benchmark"; }
  std::string summary() const override { return "Top-N analogy accuracy of a relation per filter mode"; }

  void options(CLI::App& sub) override {
    sub.add_option("--vectors", vectors_, "Vector file")->required();
    sub.add_option("--relation", relation_, "Relation file")->required();
    sub.add_option("--tags", tags_, "Tag table")->required();
    sub.add_option("--ns", ns_, "Answer counts")->capture_default_str();
    sub.add_option("--modes", modes_, "Filter modes")->capture_default_str();
    sub.add_flag("--include-query-words", cfg_.query.include_query_words, "Keep a, b and c as candidates");
    sub.add_option("--out", out_, "CSV output (default: stdout)");
  }

  int run(Context& ctx) override {
    cfg_.ns.clear();
    for (int n : parse_int_list(ns_)) {
      if (n < 1) throw ContractError(kModule, "--ns values must be >= 1");
      cfg_.ns.push_back(static_cast<std::size_t>(n));
    }
    cfg_.modes.clear();
    std::stringstream modes(modes_);
    for (std::string m; std::getline(modes, m, ',');) cfg_.modes.push_back(parse_filter_mode(m));
    cfg_.threads = threads();
    const auto emb = load_vectors(vectors_);
    const auto tags = load_tags(tags_);
    LoadReport report;
    const auto set = load_relation(relation_, known_in(emb), &report);
    report_load(ctx, report, relation_);
    const auto rows = analogy_benchmark(set, emb, tags, cfg_);
    emit(ctx, out_, [&](std::ostream& os) {
      CsvWriter csv(os);
      csv.line("relation", "N", "mode", "correct", "total", "accuracy");
      for (const auto& r : rows) csv.line(r.relation, r.n, to_string(r.mode), r.correct, r.total, r.accuracy());
    });
    return 0;
  }

 private:
  std::string vectors_;
  std::string relation_;
  std::string tags_;
  std::string out_;
  std::string ns_ = "1,5,10,25,50";
  std::string modes_ = "none,pos,lex";
  AnalogyBenchmarkConfig cfg_;
};

class ReplayCommand : public Command {
 public:
  std::string name() const override { return "replay"; }
  std::string summary() const override { return "Rerun the command recorded in a manifest, single-threaded"; }

  void options(CLI::App& sub) override {
    sub.add_option("--manifest", manifest_, "Manifest written next to an earlier output")->required();
    sub.add_option("--out", out_, "Write the primary output here instead of the recorded path");
  }

  int run(Context& ctx) override {
    const auto m = load_manifest(manifest_);
    const fs::path cwd = m.cwd;
    for (const auto& in : m.inputs) {
      const fs::path p = fs::path(in.path).is_absolute() ? fs::path(in.path) : cwd / in.path;
      if (sha256_file(p) != in.sha256) {
        throw ContractError(kModule, "input " + in.option + " '" + p.string() + "' changed since the run");
      }
    }
    std::vector<std::string> argv;
    for (std::size_t i = 0; i < m.argv.size(); ++i) {
      if (m.argv[i] == "--threads" && i + 1 < m.argv.size()) {
        ++i;
        continue;
      }
      if (m.argv[i].rfind("--threads=", 0) == 0) continue;
      argv.push_back(m.argv[i]);
    }
    if (!out_.empty()) {
      const std::string out = fs::absolute(out_).string();
      if (!redirect(argv, "--out", out)) throw ContractError(kModule, "the recorded run has no --out to redirect");
      redirect(argv, "--directions", out + ".directions.csv");
    }
    argv.push_back("--threads");
    argv.push_back("1");

    const fs::path here = fs::current_path();
    fs::current_path(cwd);
    int status = 0;
    try {
      status = dispatch(argv, ctx.out, ctx.err);
    } catch (...) {
      fs::current_path(here);
      throw;
    }
    fs::current_path(here);
    return status;
  }

 private:
  static bool redirect(std::vector<std::string>& argv, const std::string& option, const std::string& value) {
    for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
      if (argv[i] == option) {
        argv[i + 1] = value;
        return true;
      }
      if (argv[i].rfind(option + "=", 0) == 0) {
        argv[i] = option + "=" + value;
        return true;
      }
    }
    return false;
  }

  std::string manifest_;
  std::string out_;
};

std::vector<std::unique_ptr<Command>> make_commands() {
  std::vector<std::unique_ptr<Command>> out;
  out.push_back(std::make_unique<CountCommand>());
  out.push_back(std::make_unique<TrainCommand>());
  out.push_back(std::make_unique<BasisCommand>());
  out.push_back(std::make_unique<ExtendCategoryCommand>());
  out.push_back(std::make_unique<ExtendRelationCommand>());
  out.push_back(std::make_unique<RelationExperimentCommand>());
  out.push_back(std::make_unique<LearnVectorCommand>());
  out.push_back(std::make_unique<AnalogyCommand>());
  out.push_back(std::make_unique<AnalogyBenchmarkCommand>());
  out.push_back(std::make_unique<CaptureExperimentCommand>());
  out.push_back(std::make_unique<ReplayCommand>());
  return out;
}

}  // namespace

std::vector<std::string> subcommand_names() {
  std::vector<std::string> out;
  for (const auto& c : make_commands()) out.push_back(c->name());
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Word-vector subspaces for knowledge-base extension", "subkb"};
  app.require_subcommand(1, 1);
  auto commands = make_commands();
  std::vector<std::pair<CLI::App*, Command*>> bound;
  for (auto& c : commands) bound.emplace_back(app.add_subcommand(c->name(), c->summary()), c.get());
  for (auto& [sub, c] : bound) c->bind(*sub);

  const bool asks_help = !args.empty() && (args[0] == "-h" || args[0] == "--help");
  const bool known = !args.empty() && std::any_of(bound.begin(), bound.end(), [&](const auto& b) {
    return b.first->get_name() == args[0];
  });
  if (asks_help) {
    out << app.help();
    return 0;
  }
  if (!known) {
    err << "error: cli: " << (args.empty() ? std::string("missing subcommand") : "unknown subcommand '" + args[0] + "'")
        << '\n'
        << app.help();
    return 2;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: cli: " << one_line(e.what()) << '\n';
    return 2;
  }

  Command* chosen = nullptr;
  for (auto& [sub, c] : bound) {
    if (sub->parsed()) chosen = c;
  }
  Context ctx{out, err, args};
  try {
    return chosen->run(ctx);
  } catch (const Error& e) {
    err << "error: " << e.module() << ": " << one_line(e.what()) << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "error: " << kModule << ": " << one_line(e.what()) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << kModule << ": " << one_line(e.what()) << '\n';
  }
  return 1;
}

}  // namespace subkb::cli
