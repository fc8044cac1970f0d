#include "subkb/word_sets.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "subkb/embedding.hpp"
#include "subkb/errors.hpp"
#include "text_util.hpp"

namespace subkb {

namespace {

constexpr const char* kModule = "word_sets";

std::vector<std::string> distinct(const std::vector<WordPair>& pairs, bool left) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : pairs) {
    const auto& w = left ? p.first : p.second;
    if (seen.insert(w).second) out.push_back(w);
  }
  return out;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    fn(fields, line_no);
  }
  if (in.bad()) throw IoError(kModule, "read error");
}

}  // namespace

std::vector<std::string> RelationSet::left() const { return distinct(pairs, true); }
std::vector<std::string> RelationSet::right() const { return distinct(pairs, false); }

std::vector<std::string> LoadReport::warnings() const {
  std::vector<std::string> out;
  if (dropped_unknown > 0) out.push_back("dropped " + std::to_string(dropped_unknown) + " out-of-vocabulary");
  if (duplicates > 0) out.push_back("removed " + std::to_string(duplicates) + " duplicate");
  return out;
}

KnownWord known_in(const EmbeddingSet& emb) {
  return [&emb](std::string_view w) { return emb.contains(w); };
}

CategorySet read_category(std::istream& in, std::string name, const KnownWord& known, LoadReport* report) {
  CategorySet set{std::move(name), {}};
  LoadReport local;
  std::unordered_set<std::string> seen;
  for_each_line(in, [&](const std::vector<std::string_view>& fields, std::size_t line_no) {
    if (fields.size() != 1) throw FormatError(kModule, "category lines hold exactly one word", line_no);
    std::string word(fields[0]);
    if (known && !known(word)) {
      ++local.dropped_unknown;
      return;
    }
    if (!seen.insert(word).second) {
      ++local.duplicates;
      return;
    }
    set.members.push_back(std::move(word));
  });
  if (report) *report = local;
  return set;
}

CategorySet load_category(const std::filesystem::path& path, const KnownWord& known, LoadReport* report) {
  auto in = detail::open_input(path, kModule);
  try {
    return read_category(in, path.stem().string(), known, report);
  } catch (const FormatError& e) {
    throw e.in_file(path.string());
  }
}

void write_category(const CategorySet& set, std::ostream& out) {
  for (const auto& w : set.members) out << w << '\n';
}

void save_category(const CategorySet& set, const std::filesystem::path& path) {
  auto out = detail::open_output(path, kModule);
  write_category(set, out);
  detail::finish_output(out, path, kModule);
}

RelationSet read_relation(std::istream& in, std::string name, const KnownWord& known, LoadReport* report) {
  RelationSet set{std::move(name), {}};
  LoadReport local;
  std::set<WordPair> seen;
  for_each_line(in, [&](const std::vector<std::string_view>& fields, std::size_t line_no) {
    if (fields.size() != 2) throw FormatError(kModule, "relation lines hold exactly two words", line_no);
    WordPair pair{std::string(fields[0]), std::string(fields[1])};
    if (known && (!known(pair.first) || !known(pair.second))) {
      ++local.dropped_unknown;
      return;
    }
    if (!seen.insert(pair).second) {
      ++local.duplicates;
      return;
    }
    set.pairs.push_back(std::move(pair));
  });
  if (report) *report = local;
  return set;
}

RelationSet load_relation(const std::filesystem::path& path, const KnownWord& known, LoadReport* report) {
  auto in = detail::open_input(path, kModule);
  try {
    return read_relation(in, path.stem().string(), known, report);
  } catch (const FormatError& e) {
    throw e.in_file(path.string());
  }
}

void write_relation(const RelationSet& set, std::ostream& out) {
  for (const auto& [a, b] : set.pairs) out << a << ' ' << b << '\n';
}

void save_relation(const RelationSet& set, const std::filesystem::path& path) {
  auto out = detail::open_output(path, kModule);
  write_relation(set, out);
  detail::finish_output(out, path, kModule);
}

}  // namespace subkb
