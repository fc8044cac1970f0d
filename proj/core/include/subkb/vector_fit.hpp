#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "subkb/corpus.hpp"
#include "subkb/embedding.hpp"
#include "subkb/subspace.hpp"
#include "subkb/word_sets.hpp"

namespace subkb {

/// min((x / 10)^0.75, 1).
double weight_g(double x);

/// Co-occurrence counts Y(w_hat, w) gathered from a small corpus, keyed by
/// ids of the embedding set.
struct FitCounts {
  std::vector<WordId> words;
  std::vector<double> counts;
  /// Sum of Y(w_hat, w) over every word of the small corpus that passed the
  /// minimum count, whether or not it has a vector.
  double total = 0.0;
};

struct FitConfig {
  int rank = 3;
  double learning_rate = 0.05;
  double lambda = 1.0;
  std::uint64_t min_count = 10;
  int window = 10;
  int epochs = 200;
  std::uint64_t seed = 1;
  /// <= 0 selects 0.5 / d.
  double init_scale = 0.0;
  double adagrad_epsilon = 1e-8;

  void validate() const;
};

/// sum g(Y_w) (||v + v_w||^2 - log Y_w + Z)^2 + lambda ||v - U b||^2.
double fit_loss(const Eigen::VectorXd& v, const Eigen::VectorXd& b, double z, const FitCounts& y,
                const EmbeddingSet& emb, const SubspaceBasis& basis, double lambda);

struct FitGradient {
  Eigen::VectorXd v;
  Eigen::VectorXd b;
  double z = 0.0;
};

FitGradient fit_gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& b, double z, const FitCounts& y,
                         const EmbeddingSet& emb, const SubspaceBasis& basis, double lambda);

struct FitResult {
  Eigen::VectorXd vector;  // unit norm
  /// Parameters as trained, before normalization.
  Eigen::VectorXd raw_vector;
  Eigen::VectorXd b;
  double z = 0.0;
  double final_loss = 0.0;
  double total_cooccurrence = 0.0;
  std::size_t terms = 0;
};

/// Counts Y(w_hat, w) over a small corpus: words of that corpus seen at least
/// min_count times, restricted to words with vectors and excluding w_hat.
FitCounts collect_fit_counts(const std::string& target, const std::filesystem::path& corpus,
                             const EmbeddingSet& emb, std::uint64_t min_count, int window);
FitCounts collect_fit_counts(const std::string& target, const std::vector<std::string>& tokens,
                             const EmbeddingSet& emb, std::uint64_t min_count, int window);

/// Adagrad on (v, Z) with b held at its closed form U^T v, refreshed after
/// every epoch. Each epoch is a shuffled pass over the count terms and the
/// regularizer.
FitResult fit_vector(const FitCounts& y, const EmbeddingSet& emb, const SubspaceBasis& basis,
                     const FitConfig& cfg);

/// Learns a vector for `target` from the small corpus, regularized towards
/// the subspace of its category. The target is left out of the basis.
FitResult learn_vector(const std::string& target, const CategorySet& category,
                       const std::filesystem::path& corpus, const EmbeddingSet& emb, const FitConfig& cfg);

struct OrderCosine {
  std::size_t order = 0;  // 1-based
  double cosine = 0.0;
};

/// Rank of the true vector of `target` among all vectors by descending dot
/// product with `fitted` (ties counted in the target's favour), and the dot
/// product itself.
OrderCosine order_and_cosine(const Eigen::Ref<const Eigen::VectorXd>& fitted, const std::string& target,
                             const EmbeddingSet& emb);

}  // namespace subkb
