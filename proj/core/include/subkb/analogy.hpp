#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subkb/embedding.hpp"
#include "subkb/word_sets.hpp"

namespace subkb {

/// The 45 lexicographer file names of the Wordnet lexicon.
const std::array<std::string_view, 45>& lex_tag_names();
bool is_lex_tag(std::string_view tag);

struct WordTags {
  std::set<std::string> pos;
  std::set<std::string> lex;
};

/// POS and LEX tags per word. Words absent from the table have no tags.
class TagTable {
 public:
  /// Replaces the tags of `word`. Unknown LEX names are a contract error.
  void set(const std::string& word, WordTags tags);
  const WordTags* find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != nullptr; }
  std::size_t size() const noexcept { return tags_.size(); }
  std::vector<std::string> words() const;  // sorted

 private:
  std::unordered_map<std::string, WordTags> tags_;
};

/// `word<TAB>POS:t1,t2<TAB>LEX:t3,t4` per line.
TagTable load_tags(const std::filesystem::path& path);
TagTable read_tags(std::istream& in);
void save_tags(const TagTable& tags, const std::filesystem::path& path);
void write_tags(const TagTable& tags, std::ostream& out);

enum class FilterMode { kNone, kPos, kLex };
std::string_view to_string(FilterMode mode);
FilterMode parse_filter_mode(std::string_view text);

struct FilterResult {
  std::vector<WordId> candidates;  // ascending ids
  /// Set when the filter word has no table entry (the result is then empty).
  bool missing_entry = false;
};

/// Vocabulary words sharing at least one POS (or LEX) tag with `word`.
FilterResult filter_candidates(std::string_view word, FilterMode mode, const TagTable& tags,
                               const EmbeddingSet& emb);

struct QueryOptions {
  /// Keep a, b and c in the candidate pool.
  bool include_query_words = false;
};

struct ScoredWord {
  WordId id = 0;
  double cosine = 0.0;
};

/// Top-n candidates by cosine similarity to v_b - v_a + v_c, descending,
/// ties by ascending word. n must lie in [1, |pool|].
std::vector<ScoredWord> solve_query(std::string_view a, std::string_view b, std::string_view c,
                                    const std::vector<WordId>& candidates, std::size_t n,
                                    const EmbeddingSet& emb, const QueryOptions& options = {});
/// Query over the whole vocabulary.
std::vector<ScoredWord> solve_query(std::string_view a, std::string_view b, std::string_view c,
                                    std::size_t n, const EmbeddingSet& emb, const QueryOptions& options = {});

struct AnalogyBenchmarkRow {
  std::string relation;
  std::size_t n = 0;
  FilterMode mode = FilterMode::kNone;
  std::size_t correct = 0;
  std::size_t total = 0;
  /// Queries that could not be run (missing vectors); counted as incorrect.
  std::size_t failed = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

struct AnalogyBenchmarkConfig {
  std::vector<std::size_t> ns{1, 5, 10, 25, 50};
  std::vector<FilterMode> modes{FilterMode::kNone, FilterMode::kPos, FilterMode::kLex};
  QueryOptions query;
  int threads = 1;
};

/// Solves a:b::c:?? for every ordered pair of distinct pairs (a,b), (c,d)
/// of the relation, for every n and mode; correct when d is among the top n.
/// Rows are n-major, then mode in config order.
std::vector<AnalogyBenchmarkRow> analogy_benchmark(const RelationSet& set, const EmbeddingSet& emb,
                                                   const TagTable& tags, const AnalogyBenchmarkConfig& cfg);

}  // namespace subkb
