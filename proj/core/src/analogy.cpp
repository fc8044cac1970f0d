#include "subkb/analogy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "subkb/errors.hpp"
#include "subkb/parallel.hpp"
#include "text_util.hpp"

namespace subkb {

namespace {

constexpr const char* kModule = "analogy";

constexpr std::array<std::string_view, 45> kLexNames = {
    "adj.all",           "adj.pert",         "adv.all",          "noun.Tops",        "noun.act",
    "noun.animal",       "noun.artifact",    "noun.attribute",   "noun.body",        "noun.cognition",
    "noun.communication", "noun.event",      "noun.feeling",     "noun.food",        "noun.group",
    "noun.location",     "noun.motive",      "noun.object",      "noun.person",      "noun.phenomenon",
    "noun.plant",        "noun.possession",  "noun.process",     "noun.quantity",    "noun.relation",
    "noun.shape",        "noun.state",       "noun.substance",   "noun.time",        "verb.body",
    "verb.change",       "verb.cognition",   "verb.communication", "verb.competition", "verb.consumption",
    "verb.contact",      "verb.creation",    "verb.emotion",     "verb.motion",      "verb.perception",
    "verb.possession",   "verb.social",      "verb.stative",     "verb.weather",     "adj.ppl",
};

bool shares_tag(const std::set<std::string>& x, const std::set<std::string>& y) {
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i == *j) return true;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

std::set<std::string> parse_tag_list(std::string_view field, std::string_view prefix, std::size_t line_no) {
  if (field.substr(0, prefix.size()) != prefix) {
    throw FormatError(kModule, "expected field starting with '" + std::string(prefix) + "'", line_no);
  }
  std::set<std::string> out;
  const auto body = field.substr(prefix.size());
  if (body.empty()) return out;
  for (auto tag : detail::split_on(body, ',')) {
    if (tag.empty()) throw FormatError(kModule, "empty tag", line_no);
    out.emplace(tag);
  }
  return out;
}

void write_tag_list(std::ostream& out, const std::set<std::string>& tags) {
  bool first = true;
  for (const auto& t : tags) {
    if (!first) out << ',';
    out << t;
    first = false;
  }
}

bool ranks_before(const ScoredWord& x, const ScoredWord& y, const EmbeddingSet& emb) {
  if (x.cosine != y.cosine) return x.cosine > y.cosine;
  return emb.word(x.id) < emb.word(y.id);
}

}  // namespace

const std::array<std::string_view, 45>& lex_tag_names() { return kLexNames; }

bool is_lex_tag(std::string_view tag) {
  return std::find(kLexNames.begin(), kLexNames.end(), tag) != kLexNames.end();
}

void TagTable::set(const std::string& word, WordTags tags) {
  for (const auto& t : tags.lex) {
    if (!is_lex_tag(t)) throw ContractError(kModule, "unknown LEX tag '" + t + "' for word '" + word + "'");
  }
  tags_[word] = std::move(tags);
}

const WordTags* TagTable::find(std::string_view word) const {
  auto it = tags_.find(std::string(word));
  return it == tags_.end() ? nullptr : &it->second;
}

std::vector<std::string> TagTable::words() const {
  std::vector<std::string> out;
  out.reserve(tags_.size());
  for (const auto& [w, _] : tags_) out.push_back(w);
  std::sort(out.begin(), out.end());
  return out;
}

TagTable read_tags(std::istream& in) {
  TagTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = detail::strip_cr(line);
    if (view.empty()) continue;
    const auto fields = detail::split_on(view, '\t');
    if (fields.size() != 3 || fields[0].empty()) {
      throw FormatError(kModule, "expected 'word<TAB>POS:...<TAB>LEX:...'", line_no);
    }
    std::string word(fields[0]);
    if (table.contains(word)) throw FormatError(kModule, "duplicate entry for '" + word + "'", line_no);
    WordTags tags{parse_tag_list(fields[1], "POS:", line_no), parse_tag_list(fields[2], "LEX:", line_no)};
    for (const auto& t : tags.lex) {
      if (!is_lex_tag(t)) throw FormatError(kModule, "unknown LEX tag '" + t + "'", line_no);
    }
    table.set(word, std::move(tags));
  }
  if (in.bad()) throw IoError(kModule, "read error");
  return table;
}

TagTable load_tags(const std::filesystem::path& path) {
  auto in = detail::open_input(path, kModule);
  try {
    return read_tags(in);
  } catch (const FormatError& e) {
    throw e.in_file(path.string());
  }
}

void write_tags(const TagTable& tags, std::ostream& out) {
  for (const auto& w : tags.words()) {
    const WordTags* t = tags.find(w);
    out << w << "\tPOS:";
    write_tag_list(out, t->pos);
    out << "\tLEX:";
    write_tag_list(out, t->lex);
    out << '\n';
  }
}

void save_tags(const TagTable& tags, const std::filesystem::path& path) {
  auto out = detail::open_output(path, kModule);
  write_tags(tags, out);
  detail::finish_output(out, path, kModule);
}

std::string_view to_string(FilterMode mode) {
  switch (mode) {
    case FilterMode::kNone: return "none";
    case FilterMode::kPos: return "pos";
    case FilterMode::kLex: return "lex";
  }
  return "none";
}

FilterMode parse_filter_mode(std::string_view text) {
  if (text == "none") return FilterMode::kNone;
  if (text == "pos") return FilterMode::kPos;
  if (text == "lex") return FilterMode::kLex;
  throw ContractError(kModule, "unknown filter mode '" + std::string(text) + "' (none|pos|lex)");
}

FilterResult filter_candidates(std::string_view word, FilterMode mode, const TagTable& tags, const EmbeddingSet& emb) {
  FilterResult out;
  if (mode == FilterMode::kNone) {
    out.candidates.resize(emb.size());
    for (std::size_t i = 0; i < emb.size(); ++i) out.candidates[i] = static_cast<WordId>(i);
    return out;
  }
  const WordTags* own = tags.find(word);
  if (!own) {
    out.missing_entry = true;
    return out;
  }
  const auto& own_set = mode == FilterMode::kPos ? own->pos : own->lex;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const WordTags* other = tags.find(emb.words()[i]);
    if (!other) continue;
    if (shares_tag(own_set, mode == FilterMode::kPos ? other->pos : other->lex)) {
      out.candidates.push_back(static_cast<WordId>(i));
    }
  }
  return out;
}

std::vector<ScoredWord> solve_query(std::string_view a, std::string_view b, std::string_view c,
                                    const std::vector<WordId>& candidates, std::size_t n, const EmbeddingSet& emb,
                                    const QueryOptions& options) {
  const WordId ia = emb.require(a);
  const WordId ib = emb.require(b);
  const WordId ic = emb.require(c);
  const Eigen::VectorXd target = emb.vector(ib) - emb.vector(ia) + emb.vector(ic);
  const double target_norm = target.norm();

  std::vector<ScoredWord> pool;
  pool.reserve(candidates.size());
  for (WordId w : candidates) {
    if (w < 0 || static_cast<std::size_t>(w) >= emb.size()) throw ContractError(kModule, "candidate id out of range");
    if (!options.include_query_words && (w == ia || w == ib || w == ic)) continue;
    const double norm = emb.vector(w).norm() * target_norm;
    pool.push_back({w, norm > 0.0 ? emb.vector(w).dot(target) / norm : 0.0});
  }
  if (n < 1 || n > pool.size()) {
    throw ContractError(kModule, "requested " + std::to_string(n) + " answers from a pool of " +
                                     std::to_string(pool.size()) + " candidates");
  }
  auto before = [&](const ScoredWord& x, const ScoredWord& y) { return ranks_before(x, y, emb); };
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n), pool.end(), before);
  pool.resize(n);
  return pool;
}

std::vector<ScoredWord> solve_query(std::string_view a, std::string_view b, std::string_view c, std::size_t n,
                                    const EmbeddingSet& emb, const QueryOptions& options) {
  std::vector<WordId> all(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i) all[i] = static_cast<WordId>(i);
  return solve_query(a, b, c, all, n, emb, options);
}

std::vector<AnalogyBenchmarkRow> analogy_benchmark(const RelationSet& set, const EmbeddingSet& emb,
                                                   const TagTable& tags, const AnalogyBenchmarkConfig& cfg) {
  if (set.pairs.size() < 2) throw ContractError(kModule, "relation '" + set.name + "' needs at least 2 pairs");
  if (cfg.ns.empty() || cfg.modes.empty()) throw ContractError(kModule, "no answer counts or modes requested");
  for (auto n : cfg.ns) {
    if (n < 1) throw ContractError(kModule, "answer counts must be >= 1");
  }
  const std::size_t max_n = *std::max_element(cfg.ns.begin(), cfg.ns.end());

  // Candidate pools depend only on (b, mode).
  std::map<std::pair<std::string, FilterMode>, std::vector<WordId>> pools;
  for (const auto& [a, b] : set.pairs) {
    for (auto mode : cfg.modes) {
      auto key = std::make_pair(b, mode);
      if (!pools.count(key)) pools.emplace(key, filter_candidates(b, mode, tags, emb).candidates);
    }
  }

  // rank[q][m] = 0-based position of d in the answer list, or max_n if absent.
  struct Outcome {
    std::vector<std::size_t> rank;
    bool failed = false;
  };
  const std::size_t pairs = set.pairs.size();
  std::vector<Outcome> outcomes(pairs * pairs);
  parallel_for(pairs, cfg.threads, [&](std::size_t i) {
    const auto& [a, b] = set.pairs[i];
    for (std::size_t j = 0; j < pairs; ++j) {
      if (i == j) continue;
      const auto& [c, d] = set.pairs[j];
      Outcome& out = outcomes[i * pairs + j];
      out.rank.assign(cfg.modes.size(), max_n);
      if (!emb.contains(a) || !emb.contains(b) || !emb.contains(c) || !emb.contains(d)) {
        out.failed = true;
        continue;
      }
      const WordId id = *emb.find(d);
      for (std::size_t m = 0; m < cfg.modes.size(); ++m) {
        const auto& pool = pools.at({b, cfg.modes[m]});
        std::size_t usable = 0;
        for (WordId w : pool) {
          if (cfg.query.include_query_words || (emb.word(w) != a && emb.word(w) != b && emb.word(w) != c)) ++usable;
        }
        if (usable == 0) continue;
        const auto answers = solve_query(a, b, c, pool, std::min(max_n, usable), emb, cfg.query);
        for (std::size_t r = 0; r < answers.size(); ++r) {
          if (answers[r].id == id) {
            out.rank[m] = r;
            break;
          }
        }
      }
    }
  });

  std::vector<AnalogyBenchmarkRow> rows;
  for (auto n : cfg.ns) {
    for (std::size_t m = 0; m < cfg.modes.size(); ++m) {
      AnalogyBenchmarkRow row;
      row.relation = set.name;
      row.n = n;
      row.mode = cfg.modes[m];
      for (std::size_t i = 0; i < pairs; ++i) {
        for (std::size_t j = 0; j < pairs; ++j) {
          if (i == j) continue;
          const Outcome& out = outcomes[i * pairs + j];
          ++row.total;
          if (out.failed) {
            ++row.failed;
          } else if (out.rank[m] < n) {
            ++row.correct;
          }
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace subkb
