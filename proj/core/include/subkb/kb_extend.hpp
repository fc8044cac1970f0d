#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subkb/embedding.hpp"
#include "subkb/subspace.hpp"
#include "subkb/word_sets.hpp"

namespace subkb {

struct CategoryCandidate {
  std::string word;
  double projection = 0.0;
};

struct RelationCandidate {
  std::string a;
  std::string b;
  double projection = 0.0;
};

/// Candidates ordered by descending projection, ties by ascending word.
struct CategoryExtension {
  std::vector<CategoryCandidate> items;
  SubspaceBasis basis;
};

struct RelationExtension {
  std::vector<RelationCandidate> items;
  CategoryExtension left;
  CategoryExtension right;
  SubspaceBasis basis;
};

/// Words outside the set whose vectors satisfy v . u_1 > 0 and
/// ||U_k^T v|| > delta for the rank-k basis of the members.
CategoryExtension extend_category(const CategorySet& set, const EmbeddingSet& emb, int rank, double delta);

struct RelationExtendConfig {
  int rank_left = 3;
  int rank_right = 3;
  int rank_relation = 3;
  double delta_left = 0.5;
  double delta_right = 0.5;
  double delta_relation = 0.5;
  /// Upper bound on |S_A| * |S_B| before the pair scan is refused.
  std::size_t max_candidate_pairs = 10'000'000;
};

/// Extends each side of the relation as a category, then keeps the pairs of
/// the cross product whose difference vectors pass the sign and threshold
/// tests against the rank-k_r basis of the relation's differences.
RelationExtension extend_relation(const RelationSet& set, const EmbeddingSet& emb,
                                  const RelationExtendConfig& cfg);

struct RelationExperimentConfig {
  std::vector<int> ranks;
  std::vector<double> deltas;
  int trials = 50;
  double train_fraction = 0.3;
  std::uint64_t seed = 1;
  std::size_t max_candidate_pairs = 10'000'000;
  int threads = 1;
};

struct RelationExperimentRow {
  int rank = 0;
  double delta = 0.0;
  /// Mean of per-trial accuracy over trials with at least one scored answer.
  double mean_accuracy = 0.0;
  std::size_t scored_trials = 0;
  std::size_t empty_trials = 0;
  /// Totals over all trials.
  std::size_t correct = 0;
  std::size_t incorrect = 0;
};

struct RelationExperimentResult {
  std::vector<RelationExperimentRow> rows;  // rank-major, then delta
};

/// Cross-validated accuracy of `extend_relation`. Each trial trains on a
/// random train_fraction of the pairs; answers with a or b among the held-out
/// pairs' sides are scored, correct when the pair itself was held out.
RelationExperimentResult relation_accuracy_experiment(const RelationSet& set, const EmbeddingSet& emb,
                                                      const RelationExperimentConfig& cfg);

}  // namespace subkb
