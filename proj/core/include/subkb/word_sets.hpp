#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subkb {

class EmbeddingSet;

struct CategorySet {
  std::string name;
  std::vector<std::string> members;
};

using WordPair = std::pair<std::string, std::string>;

struct RelationSet {
  std::string name;
  std::vector<WordPair> pairs;

  std::vector<std::string> left() const;   // distinct a, first-seen order
  std::vector<std::string> right() const;  // distinct b, first-seen order
};

/// What a loader removed while reading a set file.
struct LoadReport {
  std::size_t dropped_unknown = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> warnings() const;
};

/// Predicate telling loaders which words have vectors. Members failing it
/// are dropped and counted.
using KnownWord = std::function<bool(std::string_view)>;
KnownWord known_in(const EmbeddingSet& emb);

/// Category file: one word per line. Blank lines are skipped; a line with
/// more than one token is malformed. The set name defaults to the file stem.
CategorySet load_category(const std::filesystem::path& path, const KnownWord& known = {},
                          LoadReport* report = nullptr);
CategorySet read_category(std::istream& in, std::string name, const KnownWord& known = {},
                          LoadReport* report = nullptr);
void save_category(const CategorySet& set, const std::filesystem::path& path);
void write_category(const CategorySet& set, std::ostream& out);

/// Relation file: two whitespace-separated words per line.
RelationSet load_relation(const std::filesystem::path& path, const KnownWord& known = {},
                          LoadReport* report = nullptr);
RelationSet read_relation(std::istream& in, std::string name, const KnownWord& known = {},
                          LoadReport* report = nullptr);
void save_relation(const RelationSet& set, const std::filesystem::path& path);
void write_relation(const RelationSet& set, std::ostream& out);

}  // namespace subkb
