#include "subkb/sn_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "subkb/errors.hpp"
#include "subkb/parallel.hpp"
#include "subkb/random.hpp"

namespace subkb {

namespace {

constexpr const char* kModule = "sn_trainer";

void check_shape(const Eigen::MatrixXd& vectors, const CooccurrenceMatrix& cooc, const TrainConfig& cfg) {
  if (vectors.rows() != cfg.dim) {
    throw ContractError(kModule, "vector dimension " + std::to_string(vectors.rows()) +
                                     " does not match configured dim " + std::to_string(cfg.dim));
  }
  if (static_cast<std::size_t>(vectors.cols()) != cooc.dimension()) {
    throw ContractError(kModule, "vector count does not match co-occurrence dimension");
  }
}

// Stored cell (i, j) stands for both ordered pairs when i != j.
double multiplicity(const CooccurrenceMatrix::Entry& e) { return e.row == e.col ? 1.0 : 2.0; }

}  // namespace

double weight_f(double x, double x_max, double alpha) {
  if (x <= 0.0) return 0.0;
  return std::min(std::pow(x / x_max, alpha), 1.0);
}

void TrainConfig::validate() const {
  if (dim < 1) throw ContractError(kModule, "dim must be >= 1");
  if (epochs < 1) throw ContractError(kModule, "epochs must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError(kModule, "alpha must lie in (0, 1]");
  if (!(x_max > 0.0)) throw ContractError(kModule, "x_max must be positive");
  if (!(learning_rate > 0.0)) throw ContractError(kModule, "learning rate must be positive");
  if (!(adagrad_epsilon > 0.0)) throw ContractError(kModule, "adagrad epsilon must be positive");
}

double sn_loss(const Eigen::MatrixXd& vectors, double z, const CooccurrenceMatrix& cooc, const TrainConfig& cfg) {
  check_shape(vectors, cooc, cfg);
  double loss = 0.0;
  for (const auto& e : cooc.entries()) {
    const double norm2 = (vectors.col(e.row) + vectors.col(e.col)).squaredNorm();
    const double r = std::log(e.count) - norm2 - z;
    loss += multiplicity(e) * weight_f(e.count, cfg.x_max, cfg.alpha) * r * r;
  }
  return loss;
}

double sn_loss(const EmbeddingSet& emb, const CooccurrenceMatrix& cooc, const TrainConfig& cfg) {
  return sn_loss(emb.matrix(), emb.z(), cooc, cfg);
}

SnGradient sn_gradient(const Eigen::MatrixXd& vectors, double z, const CooccurrenceMatrix& cooc,
                       const TrainConfig& cfg) {
  check_shape(vectors, cooc, cfg);
  SnGradient grad{Eigen::MatrixXd::Zero(vectors.rows(), vectors.cols()), 0.0};
  for (const auto& e : cooc.entries()) {
    const Eigen::VectorXd s = vectors.col(e.row) + vectors.col(e.col);
    const double fr = weight_f(e.count, cfg.x_max, cfg.alpha) * (std::log(e.count) - s.squaredNorm() - z);
    // Both orientations of an off-diagonal cell, or the doubled vector of a
    // diagonal one, give the same -8 f r s per endpoint.
    grad.vectors.col(e.row) -= 8.0 * fr * s;
    if (e.row != e.col) grad.vectors.col(e.col) -= 8.0 * fr * s;
    grad.z -= multiplicity(e) * 2.0 * fr;
  }
  return grad;
}

EmbeddingSet train_sn(std::vector<std::string> words, const CooccurrenceMatrix& cooc, const TrainConfig& cfg,
                      TrainStats* stats) {
  cfg.validate();
  if (cooc.empty()) throw ContractError(kModule, "co-occurrence matrix has no entries");
  if (words.size() != cooc.dimension()) {
    throw ContractError(kModule, "vocabulary size " + std::to_string(words.size()) +
                                     " does not match co-occurrence dimension " +
                                     std::to_string(cooc.dimension()));
  }

  const Eigen::Index d = cfg.dim;
  const auto n = static_cast<Eigen::Index>(cooc.dimension());
  const double scale = cfg.effective_init_scale();

  Eigen::MatrixXd vectors(d, n);
  {
    auto rng = make_rng(cfg.seed, {streams::kTrainInit});
    std::uniform_real_distribution<double> uniform(-scale, scale);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < d; ++i) vectors(i, j) = uniform(rng);
  }
  double z = 0.0;
  Eigen::MatrixXd hist_vectors = Eigen::MatrixXd::Zero(d, n);
  double hist_z = 0.0;

  const auto& entries = cooc.entries();
  std::vector<double> log_count(entries.size());
  std::vector<double> weight(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    log_count[k] = std::log(entries[k].count);
    weight[k] = weight_f(entries[k].count, cfg.x_max, cfg.alpha);
  }

  TrainStats local;
  local.initial_loss = sn_loss(vectors, z, cooc, cfg);

  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  const double lr = cfg.learning_rate;
  const double eps = cfg.adagrad_epsilon;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto shuffle_rng = make_rng(cfg.seed, {streams::kTrainShuffle, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    const int threads = std::max(cfg.threads, 1);
    const std::size_t shards = static_cast<std::size_t>(threads);
    const std::size_t block = (order.size() + shards - 1) / shards;
    parallel_for(shards, threads, [&](std::size_t shard) {
      Eigen::VectorXd s(d);
      Eigen::VectorXd g(d);
      const std::size_t begin = shard * block;
      const std::size_t end = std::min(order.size(), begin + block);
      for (std::size_t pos = begin; pos < end; ++pos) {
        const std::size_t k = order[pos];
        const auto& e = entries[k];
        s = vectors.col(e.row) + vectors.col(e.col);
        const double fr = weight[k] * (log_count[k] - s.squaredNorm() - z);
        g = -8.0 * fr * s;

        auto step = [&](Eigen::Index col) {
          hist_vectors.col(col).array() += g.array().square();
          vectors.col(col).array() -= lr * g.array() / (hist_vectors.col(col).array() + eps).sqrt();
        };
        step(e.row);
        if (e.col != e.row) step(e.col);

        const double gz = -(e.row == e.col ? 1.0 : 2.0) * 2.0 * fr;
        hist_z += gz * gz;
        z -= lr * gz / std::sqrt(hist_z + eps);

        if (!std::isfinite(fr) || !std::isfinite(z)) {
          std::ostringstream msg;
          msg << "non-finite parameter in epoch " << epoch + 1 << " at entry (" << e.row << ", " << e.col
              << ")";
          throw NumericError(kModule, msg.str());
        }
      }
    });

    const double loss = sn_loss(vectors, z, cooc, cfg);
    if (!std::isfinite(loss) || !vectors.allFinite()) {
      throw NumericError(kModule, "non-finite parameters after epoch " + std::to_string(epoch + 1));
    }
    local.epoch_loss.push_back(loss);
  }
  local.final_loss = local.epoch_loss.back();
  if (stats) *stats = std::move(local);

  EmbeddingSet emb(std::move(words), std::move(vectors), z);
  emb.normalize();
  return emb;
}

EmbeddingSet train_sn(const Vocabulary& vocab, const CooccurrenceMatrix& cooc, const TrainConfig& cfg,
                      TrainStats* stats) {
  return train_sn(vocab.words(), cooc, cfg, stats);
}

}  // namespace subkb
