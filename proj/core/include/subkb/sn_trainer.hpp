#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "subkb/corpus.hpp"
#include "subkb/embedding.hpp"

namespace subkb {

/// GloVe-style weight: min((x / x_max)^alpha, 1).
double weight_f(double x, double x_max = 100.0, double alpha = 0.75);

struct TrainConfig {
  int dim = 50;
  double learning_rate = 0.05;
  int epochs = 50;
  double x_max = 100.0;
  double alpha = 0.75;
  std::uint64_t seed = 1;
  /// Half-width of the uniform initialization; <= 0 selects 0.5 / dim.
  double init_scale = 0.0;
  double adagrad_epsilon = 1e-8;
  /// 1 runs the deterministic scan. More threads shard each epoch and update
  /// parameters without synchronization; results are then approximate.
  int threads = 1;

  double effective_init_scale() const { return init_scale > 0.0 ? init_scale : 0.5 / dim; }
  /// Throws ContractError for out-of-range fields.
  void validate() const;
};

/// Squared-norm objective summed over ordered pairs (w, w') with X > 0:
///   sum f(X) (log X - ||v_w + v_w'||^2 - Z)^2.
/// Each stored off-diagonal cell contributes twice, once per orientation.
/// `vectors` is d x n, one column per word id.
double sn_loss(const Eigen::MatrixXd& vectors, double z, const CooccurrenceMatrix& cooc,
               const TrainConfig& cfg);
double sn_loss(const EmbeddingSet& emb, const CooccurrenceMatrix& cooc, const TrainConfig& cfg);

struct SnGradient {
  Eigen::MatrixXd vectors;
  double z = 0.0;
};

/// Full-batch analytic gradient of `sn_loss`.
SnGradient sn_gradient(const Eigen::MatrixXd& vectors, double z, const CooccurrenceMatrix& cooc,
                       const TrainConfig& cfg);

struct TrainStats {
  double initial_loss = 0.0;
  /// Loss after the last epoch, before the final normalization.
  double final_loss = 0.0;
  std::vector<double> epoch_loss;
};

/// Adagrad on the squared-norm objective. One epoch is a shuffled pass over
/// the stored cells; vectors are normalized to unit length once training
/// ends. Vector ids follow the vocabulary, whose size must match the matrix.
/// A non-finite parameter aborts with a NumericError naming epoch and cell.
EmbeddingSet train_sn(const Vocabulary& vocab, const CooccurrenceMatrix& cooc, const TrainConfig& cfg,
                      TrainStats* stats = nullptr);
/// Same, with explicit word labels.
EmbeddingSet train_sn(std::vector<std::string> words, const CooccurrenceMatrix& cooc,
                      const TrainConfig& cfg, TrainStats* stats = nullptr);

}  // namespace subkb
