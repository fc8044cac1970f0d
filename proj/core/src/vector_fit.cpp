#include "subkb/vector_fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "subkb/errors.hpp"
#include "subkb/random.hpp"
#include "text_util.hpp"

namespace subkb {

namespace {

constexpr const char* kModule = "vector_fit";

void check_shapes(const Eigen::VectorXd& v, const Eigen::VectorXd& b, const FitCounts& y, const EmbeddingSet& emb,
                  const SubspaceBasis& basis) {
  if (static_cast<std::size_t>(v.size()) != emb.dim() || basis.dim() != v.size()) {
    throw ContractError(kModule, "vector, embedding and basis dimensions differ");
  }
  if (b.size() != basis.rank()) throw ContractError(kModule, "coefficient vector does not match basis rank");
  if (y.words.size() != y.counts.size()) throw ContractError(kModule, "malformed count table");
}

}  // namespace

double weight_g(double x) {
  if (x <= 0.0) return 0.0;
  return std::min(std::pow(x / 10.0, 0.75), 1.0);
}

void FitConfig::validate() const {
  if (rank < 1) throw ContractError(kModule, "rank must be >= 1");
  if (!(learning_rate > 0.0)) throw ContractError(kModule, "learning rate must be positive");
  if (!(lambda >= 0.0)) throw ContractError(kModule, "lambda must be non-negative");
  if (min_count < 1) throw ContractError(kModule, "minimum count must be >= 1");
  if (window < 1) throw ContractError(kModule, "window must be >= 1");
  if (epochs < 1) throw ContractError(kModule, "epochs must be >= 1");
}

double fit_loss(const Eigen::VectorXd& v, const Eigen::VectorXd& b, double z, const FitCounts& y,
                const EmbeddingSet& emb, const SubspaceBasis& basis, double lambda) {
  check_shapes(v, b, y, emb, basis);
  double loss = 0.0;
  for (std::size_t i = 0; i < y.words.size(); ++i) {
    const double r = (v + emb.vector(y.words[i])).squaredNorm() - std::log(y.counts[i]) + z;
    loss += weight_g(y.counts[i]) * r * r;
  }
  return loss + lambda * (v - basis.u * b).squaredNorm();
}

FitGradient fit_gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& b, double z, const FitCounts& y,
                         const EmbeddingSet& emb, const SubspaceBasis& basis, double lambda) {
  check_shapes(v, b, y, emb, basis);
  FitGradient grad{Eigen::VectorXd::Zero(v.size()), Eigen::VectorXd::Zero(b.size()), 0.0};
  for (std::size_t i = 0; i < y.words.size(); ++i) {
    const Eigen::VectorXd s = v + emb.vector(y.words[i]);
    const double gr = weight_g(y.counts[i]) * (s.squaredNorm() - std::log(y.counts[i]) + z);
    grad.v += 4.0 * gr * s;
    grad.z += 2.0 * gr;
  }
  const Eigen::VectorXd residual = v - basis.u * b;
  grad.v += 2.0 * lambda * residual;
  grad.b = -2.0 * lambda * (basis.u.transpose() * residual);
  return grad;
}

FitCounts collect_fit_counts(const std::string& target, const std::vector<std::string>& tokens,
                             const EmbeddingSet& emb, std::uint64_t min_count, int window) {
  if (window < 1) throw ContractError(kModule, "window must be >= 1");
  std::unordered_map<std::string_view, std::uint64_t> freq;
  for (const auto& t : tokens) ++freq[t];

  std::unordered_map<std::string_view, std::uint64_t> around;
  const auto k = static_cast<std::size_t>(window);
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    if (tokens[p] != target) continue;
    const std::size_t lo = p >= k ? p - k : 0;
    const std::size_t hi = std::min(tokens.size() - 1, p + k);
    for (std::size_t q = lo; q <= hi; ++q) {
      if (q != p) ++around[tokens[q]];
    }
  }

  // Sorted by word so the term order does not depend on hashing.
  std::vector<std::pair<std::string_view, std::uint64_t>> kept;
  FitCounts y;
  for (const auto& [word, count] : around) {
    if (freq[word] < min_count) continue;
    y.total += static_cast<double>(count);
    if (word == target) continue;
    if (emb.contains(word)) kept.emplace_back(word, count);
  }
  std::sort(kept.begin(), kept.end());
  for (const auto& [word, count] : kept) {
    y.words.push_back(*emb.find(word));
    y.counts.push_back(static_cast<double>(count));
  }
  return y;
}

FitCounts collect_fit_counts(const std::string& target, const std::filesystem::path& corpus, const EmbeddingSet& emb,
                             std::uint64_t min_count, int window) {
  auto in = detail::open_input(corpus, kModule);
  std::vector<std::string> tokens;
  for_each_token(in, [&](std::string_view tok) { tokens.emplace_back(tok); });
  return collect_fit_counts(target, tokens, emb, min_count, window);
}

FitResult fit_vector(const FitCounts& y, const EmbeddingSet& emb, const SubspaceBasis& basis, const FitConfig& cfg) {
  cfg.validate();
  if (y.words.empty() && cfg.lambda == 0.0) {
    throw ContractError(kModule, "no usable co-occurrence data and lambda = 0: the objective is unconstrained");
  }
  const auto d = static_cast<Eigen::Index>(emb.dim());
  if (basis.dim() != d) throw ContractError(kModule, "basis dimension does not match the embedding");

  const double scale = cfg.init_scale > 0.0 ? cfg.init_scale : 0.5 / static_cast<double>(d);
  auto init_rng = make_rng(cfg.seed, {streams::kFitInit});
  std::uniform_real_distribution<double> uniform(-scale, scale);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = uniform(init_rng);
  Eigen::VectorXd b(basis.rank());
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = uniform(init_rng);
  double z = uniform(init_rng);

  Eigen::VectorXd hist_v = Eigen::VectorXd::Zero(d);
  double hist_z = 0.0;
  const double lr = cfg.learning_rate;
  const double eps = cfg.adagrad_epsilon;
  std::vector<double> log_y(y.counts.size()), weight(y.counts.size());
  for (std::size_t i = 0; i < y.counts.size(); ++i) {
    log_y[i] = std::log(y.counts[i]);
    weight[i] = weight_g(y.counts[i]);
  }

  // Item m (one past the count terms) is the regularizer.
  const std::size_t m = y.words.size();
  std::vector<std::size_t> order(m + (cfg.lambda > 0.0 ? 1 : 0));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::VectorXd s(d), g(d);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto rng = make_rng(cfg.seed, {streams::kFitShuffle, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t item : order) {
      if (item == m) {
        g = 2.0 * cfg.lambda * (v - basis.u * b);
      } else {
        s = v + emb.vector(y.words[item]);
        const double gr = weight[item] * (s.squaredNorm() - log_y[item] + z);
        g = 4.0 * gr * s;
        const double gz = 2.0 * gr;
        hist_z += gz * gz;
        z -= lr * gz / std::sqrt(hist_z + eps);
      }
      hist_v.array() += g.array().square();
      v.array() -= lr * g.array() / (hist_v.array() + eps).sqrt();
    }
    b = basis.u.transpose() * v;
    if (!v.allFinite() || !std::isfinite(z)) {
      throw NumericError(kModule, "non-finite parameters after epoch " + std::to_string(epoch + 1));
    }
  }

  FitResult result;
  result.raw_vector = v;
  result.b = b;
  result.z = z;
  result.final_loss = fit_loss(v, b, z, y, emb, basis, cfg.lambda);
  result.total_cooccurrence = y.total;
  result.terms = m;
  const double norm = v.norm();
  if (!(norm > 0.0)) throw NumericError(kModule, "fitted vector collapsed to zero");
  result.vector = v / norm;
  return result;
}

FitResult learn_vector(const std::string& target, const CategorySet& category, const std::filesystem::path& corpus,
                       const EmbeddingSet& emb, const FitConfig& cfg) {
  cfg.validate();
  std::vector<WordId> ids;
  for (const auto& w : category.members) {
    if (w == target) continue;
    if (auto id = emb.find(w)) ids.push_back(*id);
  }
  if (ids.empty()) {
    throw ContractError(kModule, "no member of category '" + category.name + "' has a vector");
  }
  if (static_cast<std::size_t>(cfg.rank) > std::min(ids.size(), emb.dim())) {
    throw ContractError(kModule, "rank " + std::to_string(cfg.rank) + " exceeds the " + std::to_string(ids.size()) +
                                     " usable members of category '" + category.name + "'");
  }
  const SubspaceBasis basis = get_basis(emb.gather(ids), cfg.rank);
  const FitCounts y = collect_fit_counts(target, corpus, emb, cfg.min_count, cfg.window);
  return fit_vector(y, emb, basis, cfg);
}

OrderCosine order_and_cosine(const Eigen::Ref<const Eigen::VectorXd>& fitted, const std::string& target,
                             const EmbeddingSet& emb) {
  const auto id = emb.find(target);
  if (!id) throw ContractError(kModule, "no true vector for '" + target + "'");
  if (static_cast<std::size_t>(fitted.size()) != emb.dim()) {
    throw ContractError(kModule, "fitted vector dimension does not match the embedding");
  }
  const Eigen::VectorXd scores = emb.matrix().transpose() * fitted;
  const double own = scores[*id];
  const auto better = std::count_if(scores.begin(), scores.end(), [own](double s) { return s > own; });
  return {static_cast<std::size_t>(better) + 1, own};
}

}  // namespace subkb
