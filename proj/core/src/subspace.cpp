#include "subkb/subspace.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subkb/errors.hpp"
#include "subkb/parallel.hpp"
#include "subkb/random.hpp"

namespace subkb {

namespace {
constexpr const char* kModule = "subspace";
}  // namespace

SubspaceBasis SubspaceBasis::truncated(int k) const {
  if (k < 1 || k > rank()) throw ContractError(kModule, "truncation rank out of range");
  return SubspaceBasis{u.leftCols(k), singular_values.head(k), sign_fixed};
}

SubspaceBasis get_basis(const Eigen::MatrixXd& columns, int k) {
  const auto d = columns.rows();
  const auto n = columns.cols();
  if (n < 1 || d < 1) throw ContractError(kModule, "basis needs at least one non-empty vector");
  if (k < 1 || k > std::min(d, n)) {
    throw ContractError(kModule, "rank " + std::to_string(k) + " outside [1, min(d=" + std::to_string(d) +
                                     ", n=" + std::to_string(n) + ")]");
  }
  if (!columns.allFinite()) throw ContractError(kModule, "basis input contains non-finite values");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(columns, Eigen::ComputeThinU);
  SubspaceBasis basis{svd.matrixU().leftCols(k), svd.singularValues().head(k), true};

  const double orientation = columns.rowwise().sum().dot(basis.u.col(0));
  if (orientation < 0.0) {
    basis.u.col(0) = -basis.u.col(0);
  } else if (orientation == 0.0) {
    basis.sign_fixed = false;
  }
  return basis;
}

SubspaceBasis get_basis(const std::vector<Eigen::VectorXd>& vectors, int k) {
  if (vectors.empty()) throw ContractError(kModule, "basis needs at least one vector");
  Eigen::MatrixXd columns(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != columns.rows()) throw ContractError(kModule, "vectors differ in dimension");
    columns.col(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  return get_basis(columns, k);
}

double capture(const SubspaceBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != basis.dim()) throw ContractError(kModule, "vector dimension does not match basis");
  const double norm = v.norm();
  if (!(norm > 0.0)) throw ContractError(kModule, "capture of a zero vector is undefined");
  return std::min((basis.u.transpose() * v).norm() / norm, 1.0);
}

double capture_rate(const SubspaceBasis& basis, const Eigen::MatrixXd& vectors) {
  if (vectors.cols() == 0) throw ContractError(kModule, "capture rate needs at least one vector");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) sum += capture(basis, vectors.col(i));
  return sum / static_cast<double>(vectors.cols());
}

Eigen::MatrixXd category_vectors(const CategorySet& set, const EmbeddingSet& emb) {
  std::vector<WordId> ids;
  ids.reserve(set.members.size());
  for (const auto& w : set.members) ids.push_back(emb.require(w));
  return emb.gather(ids);
}

Eigen::MatrixXd relation_vectors(const RelationSet& set, const EmbeddingSet& emb) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(emb.dim()), static_cast<Eigen::Index>(set.pairs.size()));
  for (std::size_t i = 0; i < set.pairs.size(); ++i) {
    const auto& [a, b] = set.pairs[i];
    out.col(static_cast<Eigen::Index>(i)) = emb.vector(emb.require(a)) - emb.vector(emb.require(b));
  }
  return out;
}

std::pair<std::size_t, std::size_t> split_sizes(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ContractError(kModule, "train fraction must lie in (0, 1]");
  }
  const auto train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  return {std::min(train, n), n - std::min(train, n)};
}

CaptureExperimentResult cv_capture_experiment(const Eigen::MatrixXd& vectors, const std::string& set_name,
                                              const CaptureExperimentConfig& cfg) {
  const auto n = static_cast<std::size_t>(vectors.cols());
  if (n <= cfg.min_size) {
    throw ContractError(kModule, "set '" + set_name + "' has " + std::to_string(n) +
                                     " members; the experiment needs more than " + std::to_string(cfg.min_size));
  }
  if (cfg.ranks.empty()) throw ContractError(kModule, "no ranks requested");
  if (cfg.trials < 1) throw ContractError(kModule, "trials must be >= 1");
  const auto [n_train, n_test] = split_sizes(n, cfg.train_fraction);
  if (n_train == 0 || n_test == 0) {
    throw ContractError(kModule, "split of set '" + set_name + "' leaves an empty training or test part");
  }
  const int max_rank = *std::max_element(cfg.ranks.begin(), cfg.ranks.end());
  const int min_rank = *std::min_element(cfg.ranks.begin(), cfg.ranks.end());
  if (min_rank < 1 || static_cast<std::size_t>(max_rank) > std::min<std::size_t>(vectors.rows(), n_train)) {
    throw ContractError(kModule, "ranks must lie in [1, min(d, training size)] for set '" + set_name + "'");
  }
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
    if (!(vectors.col(i).norm() > 0.0)) {
      throw ContractError(kModule, "set '" + set_name + "' contains a zero vector");
    }
  }

  const auto trials = static_cast<std::size_t>(cfg.trials);
  // per_trial[t][k-1] = capture rate of the rank-k basis in trial t.
  std::vector<std::vector<double>> per_trial(trials);
  std::vector<std::vector<std::vector<double>>> dots(trials);

  parallel_for(trials, cfg.threads, [&](std::size_t t) {
    auto rng = make_rng(cfg.seed, {streams::kCaptureTrial, t});
    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    Eigen::MatrixXd train(vectors.rows(), static_cast<Eigen::Index>(n_train));
    for (std::size_t i = 0; i < n_train; ++i) train.col(static_cast<Eigen::Index>(i)) = vectors.col(perm[i]);
    const SubspaceBasis basis = get_basis(train, max_rank);

    std::vector<double> sums(static_cast<std::size_t>(max_rank), 0.0);
    dots[t].assign(static_cast<std::size_t>(max_rank), {});
    for (std::size_t i = n_train; i < n; ++i) {
      const auto v = vectors.col(perm[i]);
      const Eigen::VectorXd coords = basis.u.transpose() * v;
      const double norm = v.norm();
      // Prefix sums of squared coordinates make capture non-decreasing in k.
      double captured = 0.0;
      for (int k = 0; k < max_rank; ++k) {
        captured += coords[k] * coords[k];
        sums[static_cast<std::size_t>(k)] += std::min(std::sqrt(captured) / norm, 1.0);
        dots[t][static_cast<std::size_t>(k)].push_back(coords[k]);
      }
    }
    for (auto& s : sums) s /= static_cast<double>(n_test);
    per_trial[t] = std::move(sums);
  });

  CaptureExperimentResult result;
  for (int rank : cfg.ranks) {
    const auto k = static_cast<std::size_t>(rank - 1);
    double mean = 0.0;
    for (const auto& trial : per_trial) mean += trial[k];
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (const auto& trial : per_trial) var += (trial[k] - mean) * (trial[k] - mean);
    const double stddev = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
    result.rows.push_back({rank, mean, stddev});
  }
  result.directions.assign(static_cast<std::size_t>(max_rank), {});
  for (const auto& trial : dots) {
    for (std::size_t k = 0; k < trial.size(); ++k) {
      result.directions[k].insert(result.directions[k].end(), trial[k].begin(), trial[k].end());
    }
  }
  return result;
}

CaptureExperimentResult cv_capture_experiment(const CategorySet& set, const EmbeddingSet& emb,
                                              const CaptureExperimentConfig& cfg) {
  return cv_capture_experiment(category_vectors(set, emb), set.name, cfg);
}

CaptureExperimentResult cv_capture_experiment(const RelationSet& set, const EmbeddingSet& emb,
                                              const CaptureExperimentConfig& cfg) {
  return cv_capture_experiment(relation_vectors(set, emb), set.name, cfg);
}

}  // namespace subkb
