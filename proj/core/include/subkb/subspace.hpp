#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "subkb/embedding.hpp"
#include "subkb/word_sets.hpp"

namespace subkb {

/// Orthonormal rank-k basis (d x k) of the span of a vector set, ordered by
/// descending singular value, with the first column oriented towards the
/// data that built it.
struct SubspaceBasis {
  Eigen::MatrixXd u;
  Eigen::VectorXd singular_values;  // leading k values
  /// False when sum(v . u_1) was exactly zero and no orientation was chosen.
  bool sign_fixed = true;

  int rank() const noexcept { return static_cast<int>(u.cols()); }
  int dim() const noexcept { return static_cast<int>(u.rows()); }
  auto first() const { return u.col(0); }
  /// The basis made of the first k columns.
  SubspaceBasis truncated(int k) const;
  Eigen::MatrixXd projector() const { return u * u.transpose(); }
};

/// Leading k left-singular vectors of the d x n matrix whose columns are the
/// input vectors; u_1 is flipped so that sum(v . u_1) > 0.
/// Requires 1 <= k <= min(d, n).
SubspaceBasis get_basis(const Eigen::MatrixXd& columns, int k);
SubspaceBasis get_basis(const std::vector<Eigen::VectorXd>& vectors, int k);

/// ||U^T v|| / ||v||, clamped to [0, 1]. Zero v is a contract error.
double capture(const SubspaceBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& v);
/// Mean capture over the columns of `vectors`. Requires at least one column.
double capture_rate(const SubspaceBasis& basis, const Eigen::MatrixXd& vectors);

/// Vectors the subspace routines operate on: member vectors for a category,
/// v_a - v_b for a relation (not re-normalized).
Eigen::MatrixXd category_vectors(const CategorySet& set, const EmbeddingSet& emb);
Eigen::MatrixXd relation_vectors(const RelationSet& set, const EmbeddingSet& emb);

struct CaptureExperimentConfig {
  std::vector<int> ranks;
  int trials = 50;
  double train_fraction = 0.7;
  std::uint64_t seed = 1;
  /// The set must have strictly more members than this.
  std::size_t min_size = 50;
  int threads = 1;
};

struct CaptureRow {
  int rank = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation across trials
};

struct CaptureExperimentResult {
  std::vector<CaptureRow> rows;
  /// directions[i] holds v . u_{i+1} for every held-out v of every trial,
  /// for i below the largest requested rank. Trial order, then member order.
  std::vector<std::vector<double>> directions;
};

/// Repeated random train/test splits: the basis of each rank is fitted on
/// the training part and scored with `capture_rate` on the held-out part.
/// Works on the raw vectors (columns) so categories and relations share it.
CaptureExperimentResult cv_capture_experiment(const Eigen::MatrixXd& vectors, const std::string& set_name,
                                              const CaptureExperimentConfig& cfg);
CaptureExperimentResult cv_capture_experiment(const CategorySet& set, const EmbeddingSet& emb,
                                              const CaptureExperimentConfig& cfg);
CaptureExperimentResult cv_capture_experiment(const RelationSet& set, const EmbeddingSet& emb,
                                              const CaptureExperimentConfig& cfg);

/// Sizes of a train/test split of n items: round(fraction * n) for training.
std::pair<std::size_t, std::size_t> split_sizes(std::size_t n, double train_fraction);

}  // namespace subkb
