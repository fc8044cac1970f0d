#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subkb/corpus.hpp"

namespace subkb {

/// Dense word vectors, one column per word, plus the shared scalar Z of the
/// squared-norm model.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// `vectors` is d x n with column i belonging to `words[i]`.
  EmbeddingSet(std::vector<std::string> words, Eigen::MatrixXd vectors, double z = 0.0);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors_.rows()); }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::optional<WordId> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }
  /// Id of `word`, or a ContractError naming it.
  WordId require(std::string_view word) const;

  const Eigen::MatrixXd& matrix() const noexcept { return vectors_; }
  Eigen::MatrixXd& matrix() noexcept { return vectors_; }
  auto vector(WordId id) const { return vectors_.col(id); }
  auto vector(WordId id) { return vectors_.col(id); }

  /// Stacks the vectors of `ids` as columns.
  Eigen::MatrixXd gather(const std::vector<WordId>& ids) const;

  double z() const noexcept { return z_; }
  void set_z(double z) noexcept { z_ = z; }

  bool normalized() const noexcept { return normalized_; }
  /// Scales every vector to unit Euclidean norm. Zero vectors are left as
  /// they are and reported through the return value.
  std::size_t normalize();
  /// True when every vector has norm 1 within `tolerance`.
  bool is_unit_norm(double tolerance = 1e-6) const;
  bool all_finite() const { return vectors_.allFinite() && std::isfinite(z_); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
  Eigen::MatrixXd vectors_;
  double z_ = 0.0;
  bool normalized_ = false;
};

/// Text vector format: `<vocab_size> <d>`, then `word v1 .. vd` with six
/// significant digits, then `__Z__ <Z>`.
void save_vectors(const EmbeddingSet& emb, const std::filesystem::path& path);
void write_vectors(const EmbeddingSet& emb, std::ostream& out);
/// Writes a single `word v1 .. vd` line.
void write_vector_line(std::ostream& out, std::string_view word, const Eigen::Ref<const Eigen::VectorXd>& v);
EmbeddingSet load_vectors(const std::filesystem::path& path);
EmbeddingSet read_vectors(std::istream& in);

}  // namespace subkb
