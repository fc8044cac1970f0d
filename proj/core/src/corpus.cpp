#include "subkb/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "subkb/errors.hpp"
#include "subkb/parallel.hpp"
#include "text_util.hpp"

namespace subkb {

namespace {

constexpr const char* kModule = "corpus";

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::uint64_t pair_key(WordId i, WordId j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint32_t>(j);
}

}  // namespace

void for_each_token(std::istream& in, const std::function<void(std::string_view)>& sink) {
  std::string token;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof buffer);
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      const char c = buffer[i];
      if (detail::is_space(c)) {
        if (!token.empty()) {
          sink(token);
          token.clear();
        }
      } else {
        token.push_back(ascii_lower(c));
      }
    }
  }
  if (in.bad()) throw IoError(kModule, "read error while tokenizing");
  if (!token.empty()) sink(token);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for_each_token(in, [&](std::string_view tok) { out.emplace_back(tok); });
  return out;
}

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> counts, std::uint64_t min_count)
    : min_count_(min_count) {
  std::erase_if(counts, [&](const auto& e) { return e.second < min_count; });
  std::sort(counts.begin(), counts.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  words_.reserve(counts.size());
  counts_.reserve(counts.size());
  index_.reserve(counts.size());
  for (auto& [word, count] : counts) {
    const auto id = static_cast<WordId>(words_.size());
    if (!index_.emplace(word, id).second) {
      throw ContractError(kModule, "duplicate vocabulary word '" + word + "'");
    }
    words_.push_back(std::move(word));
    counts_.push_back(count);
  }
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::istream& corpus, std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for_each_token(corpus, [&](std::string_view tok) { ++counts[std::string(tok)]; });
  return Vocabulary({counts.begin(), counts.end()}, min_count);
}

Vocabulary build_vocabulary(const std::filesystem::path& corpus, std::uint64_t min_count) {
  auto in = detail::open_input(corpus, kModule);
  return build_vocabulary(in, min_count);
}

void write_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.words()[i] << '\t' << vocab.count(static_cast<WordId>(i)) << '\n';
  }
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  auto out = detail::open_output(path, kModule);
  write_vocabulary(vocab, out);
  detail::finish_output(out, path, kModule);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  auto in = detail::open_input(path, kModule);
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t smallest = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = detail::strip_cr(line);
    if (view.empty()) continue;
    const auto fields = detail::split_on(view, '\t');
    const auto count = fields.size() == 2 ? detail::parse_int<std::uint64_t>(fields[1]) : std::nullopt;
    if (!count || fields[0].empty()) {
      throw FormatError(kModule, "expected 'word<TAB>count' in '" + path.string() + "'", line_no);
    }
    smallest = counts.empty() ? *count : std::min(smallest, *count);
    counts.emplace_back(std::string(fields[0]), *count);
  }
  const std::uint64_t threshold = counts.empty() ? 1 : smallest;
  try {
    return Vocabulary(std::move(counts), threshold);
  } catch (const ContractError& e) {
    throw FormatError(kModule, std::string(e.what()) + " in '" + path.string() + "'");
  }
}

CooccurrenceMatrix::CooccurrenceMatrix(std::size_t dimension, int window, std::vector<Entry> triples)
    : dimension_(dimension), window_(window), row_sums_(dimension, 0.0) {
  for (auto& e : triples) {
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= dimension ||
        static_cast<std::size_t>(e.col) >= dimension) {
      throw ContractError(kModule, "co-occurrence index out of range");
    }
    if (!std::isfinite(e.count) || e.count < 0.0) {
      throw ContractError(kModule, "co-occurrence counts must be finite and non-negative");
    }
    if (e.row > e.col) std::swap(e.row, e.col);
  }
  std::sort(triples.begin(), triples.end(), [](const Entry& x, const Entry& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  for (const auto& e : triples) {
    if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
      entries_.back().count += e.count;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.count == 0.0; });
  for (const auto& e : entries_) {
    row_sums_[static_cast<std::size_t>(e.row)] += e.count;
    if (e.row != e.col) row_sums_[static_cast<std::size_t>(e.col)] += e.count;
  }
}

double CooccurrenceMatrix::at(WordId i, WordId j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{i, j},
                             [](const Entry& e, const std::pair<WordId, WordId>& key) {
                               return e.row != key.first ? e.row < key.first : e.col < key.second;
                             });
  if (it != entries_.end() && it->row == i && it->col == j) return it->count;
  return 0.0;
}

std::vector<WordId> corpus_ids(std::istream& corpus, const Vocabulary& vocab) {
  std::vector<WordId> ids;
  for_each_token(corpus, [&](std::string_view tok) {
    auto id = vocab.find(tok);
    ids.push_back(id ? *id : WordId{-1});
  });
  return ids;
}

std::vector<WordId> corpus_ids(const std::filesystem::path& corpus, const Vocabulary& vocab) {
  auto in = detail::open_input(corpus, kModule);
  return corpus_ids(in, vocab);
}

CooccurrenceMatrix count_cooccurrences(const std::vector<WordId>& ids, std::size_t dimension,
                                       const CountOptions& options) {
  if (options.window < 1) throw ContractError(kModule, "window must be >= 1");
  const std::size_t k = static_cast<std::size_t>(options.window);
  const std::size_t n = ids.size();
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(
      static_cast<std::size_t>(std::max(options.threads, 1)), n / 4096 + 1));

  // Shard s owns the pairs whose later position falls in its range.
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> partial(shards);
  const std::size_t block = (n + shards - 1) / shards;
  parallel_for(shards, options.threads, [&](std::size_t s) {
    auto& counts = partial[s];
    const std::size_t begin = s * block;
    const std::size_t end = std::min(n, begin + block);
    for (std::size_t q = begin; q < end; ++q) {
      const WordId wq = ids[q];
      if (wq < 0) continue;
      const std::size_t first = q >= k ? q - k : 0;
      for (std::size_t p = first; p < q; ++p) {
        const WordId wp = ids[p];
        if (wp < 0) continue;
        counts[pair_key(wp, wq)] += (wp == wq) ? 2 : 1;
      }
    }
  });

  auto& merged = partial.front();
  for (std::size_t s = 1; s < shards; ++s) {
    for (const auto& [key, c] : partial[s]) merged[key] += c;
    partial[s].clear();
  }
  std::vector<CooccurrenceMatrix::Entry> triples;
  triples.reserve(merged.size());
  for (const auto& [key, c] : merged) {
    triples.push_back({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xffffffffu),
                       static_cast<double>(c)});
  }
  for (const auto& e : triples) {
    if (static_cast<std::size_t>(e.col) >= dimension) {
      throw ContractError(kModule, "token id exceeds vocabulary size");
    }
  }
  return CooccurrenceMatrix(dimension, options.window, std::move(triples));
}

CooccurrenceMatrix count_cooccurrences(const std::filesystem::path& corpus, const Vocabulary& vocab,
                                       const CountOptions& options) {
  if (options.window < 1) throw ContractError(kModule, "window must be >= 1");
  return count_cooccurrences(corpus_ids(corpus, vocab), vocab.size(), options);
}

void write_cooccurrences(const CooccurrenceMatrix& cooc, std::ostream& out) {
  out << "COOC v1 " << cooc.dimension() << ' ' << cooc.window() << '\n';
  for (const auto& e : cooc.entries()) {
    out << e.row << ' ' << e.col << ' ' << detail::format_number(e.count) << '\n';
  }
}

void save_cooccurrences(const CooccurrenceMatrix& cooc, const std::filesystem::path& path) {
  auto out = detail::open_output(path, kModule);
  write_cooccurrences(cooc, out);
  detail::finish_output(out, path, kModule);
}

CooccurrenceMatrix read_cooccurrences(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(kModule, "missing COOC header", 1);
  const auto header = detail::split_ws(line);
  if (header.size() != 4 || header[0] != "COOC" || header[1] != "v1") {
    throw FormatError(kModule, "expected 'COOC v1 <vocab_size> <window_k>'", 1);
  }
  const auto dimension = detail::parse_int<std::size_t>(header[2]);
  const auto window = detail::parse_int<int>(header[3]);
  if (!dimension || !window || *window < 1) {
    throw FormatError(kModule, "bad vocabulary size or window in header", 1);
  }

  std::vector<CooccurrenceMatrix::Entry> triples;
  std::size_t line_no = 1;
  std::pair<WordId, WordId> previous{-1, -1};
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 3) throw FormatError(kModule, "expected 'i j count'", line_no);
    const auto i = detail::parse_int<WordId>(fields[0]);
    const auto j = detail::parse_int<WordId>(fields[1]);
    const auto c = detail::parse_double(fields[2]);
    if (!i || !j || !c) throw FormatError(kModule, "unparseable entry", line_no);
    if (*i < 0 || *i > *j || static_cast<std::size_t>(*j) >= *dimension) {
      throw FormatError(kModule, "entry indices must satisfy 0 <= i <= j < vocab_size", line_no);
    }
    if (!(*c > 0.0) || !std::isfinite(*c)) throw FormatError(kModule, "count must be positive", line_no);
    const std::pair<WordId, WordId> key{*i, *j};
    if (key <= previous) throw FormatError(kModule, "entries must be strictly sorted by (i, j)", line_no);
    previous = key;
    triples.push_back({*i, *j, *c});
  }
  return CooccurrenceMatrix(*dimension, *window, std::move(triples));
}

CooccurrenceMatrix load_cooccurrences(const std::filesystem::path& path) {
  auto in = detail::open_input(path, kModule);
  try {
    return read_cooccurrences(in);
  } catch (const FormatError& e) {
    throw e.in_file(path.string());
  }
}

}  // namespace subkb
