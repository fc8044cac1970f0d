#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subkb {

using WordId = std::int32_t;

/// Lowercases ASCII letters and splits on ASCII whitespace. Bytes >= 0x80
/// are kept verbatim so UTF-8 tokens pass through untouched.
void for_each_token(std::istream& in, const std::function<void(std::string_view)>& sink);
std::vector<std::string> tokenize(std::string_view text);

/// Thresholded vocabulary in canonical order: descending count, ties broken
/// lexicographically. Ids are positions in that order.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Keeps the entries with count >= min_count. Duplicate words are an error.
  Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> counts, std::uint64_t min_count);

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  std::uint64_t min_count() const noexcept { return min_count_; }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::uint64_t count(WordId id) const { return counts_.at(static_cast<std::size_t>(id)); }
  std::optional<WordId> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
  std::uint64_t min_count_ = 1;
};

/// Counts every token of the corpus and keeps those seen at least m0 times.
Vocabulary build_vocabulary(const std::filesystem::path& corpus, std::uint64_t min_count);
Vocabulary build_vocabulary(std::istream& corpus, std::uint64_t min_count);

/// `word<TAB>count` per line, canonical order.
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
void write_vocabulary(const Vocabulary& vocab, std::ostream& out);
/// The loaded threshold is the smallest stored count (1 for an empty file).
Vocabulary load_vocabulary(const std::filesystem::path& path);

/// Sparse symmetric co-occurrence counts. Only the upper triangle (i <= j)
/// is stored, sorted by (i, j); `at(j, i)` reads the same cell as `at(i, j)`.
///
/// Values are doubles so planted real-valued matrices can be represented;
/// corpus counts are integers and stay exact.
class CooccurrenceMatrix {
 public:
  struct Entry {
    WordId row;
    WordId col;
    double count;
  };

  CooccurrenceMatrix() = default;

  /// Builds from arbitrary (i, j, count) triples. Triples with i > j are
  /// mirrored, duplicates are summed, zero counts dropped. Negative or
  /// non-finite counts and out-of-range ids are contract errors.
  CooccurrenceMatrix(std::size_t dimension, int window, std::vector<Entry> triples);

  std::size_t dimension() const noexcept { return dimension_; }
  int window() const noexcept { return window_; }

  /// Stored upper-triangle entries, each with count > 0.
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double at(WordId i, WordId j) const;
  /// X_w = sum over all columns of the full symmetric row.
  double row_sum(WordId i) const { return row_sums_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& row_sums() const noexcept { return row_sums_; }

 private:
  std::size_t dimension_ = 0;
  int window_ = 0;
  std::vector<Entry> entries_;
  std::vector<double> row_sums_;
};

struct CountOptions {
  int window = 10;
  int threads = 1;
};

/// Symmetric window counts. For every pair of corpus positions p < q with
/// q - p <= window and both tokens in the vocabulary, X(w_p, w_q) and
/// X(w_q, w_p) each gain one (a repeated word therefore adds 2 to its
/// diagonal cell). Out-of-vocabulary tokens still occupy their positions.
/// Windows are truncated at the corpus boundaries.
CooccurrenceMatrix count_cooccurrences(const std::filesystem::path& corpus, const Vocabulary& vocab,
                                       const CountOptions& options);
CooccurrenceMatrix count_cooccurrences(const std::vector<WordId>& token_ids, std::size_t dimension,
                                       const CountOptions& options);

/// Maps a corpus to vocabulary ids, -1 for out-of-vocabulary tokens.
std::vector<WordId> corpus_ids(const std::filesystem::path& corpus, const Vocabulary& vocab);
std::vector<WordId> corpus_ids(std::istream& corpus, const Vocabulary& vocab);

/// `COOC v1 <vocab_size> <window_k>` header, then `i j count` with i <= j
/// sorted by (i, j). Integral counts are written without a fractional part.
void save_cooccurrences(const CooccurrenceMatrix& cooc, const std::filesystem::path& path);
void write_cooccurrences(const CooccurrenceMatrix& cooc, std::ostream& out);
CooccurrenceMatrix load_cooccurrences(const std::filesystem::path& path);
CooccurrenceMatrix read_cooccurrences(std::istream& in);

}  // namespace subkb
