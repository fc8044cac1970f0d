#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "subkb/errors.hpp"
#include "subkb/sn_trainer.hpp"
#include "subkb/vector_fit.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

using namespace subkb;
using namespace subkb::testing;

namespace {

EmbeddingSet random_unit_embedding(Rng& rng, int d, int n) {
  Eigen::MatrixXd m(d, n);
  for (int i = 0; i < n; ++i) m.col(i) = random_unit(rng, d);
  EmbeddingSet emb(numbered_words("w", static_cast<std::size_t>(n)), m);
  emb.normalize();
  return emb;
}

FitCounts random_counts(Rng& rng, int n, int terms) {
  std::vector<WordId> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(static_cast<std::size_t>(terms));
  std::sort(ids.begin(), ids.end());
  std::uniform_int_distribution<int> count(1, 40);
  FitCounts y;
  for (auto id : ids) {
    y.words.push_back(id);
    y.counts.push_back(count(rng));
    y.total += y.counts.back();
  }
  return y;
}

Eigen::VectorXd dense_counts(const FitCounts& y, std::size_t n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < y.words.size(); ++i) out[y.words[i]] = y.counts[i];
  return out;
}

}  // namespace

TEST(WeightG, Examples) {
  EXPECT_EQ(weight_g(0.0), 0.0);
  EXPECT_EQ(weight_g(10.0), 1.0);
  EXPECT_NEAR(weight_g(5.0), 0.59460, 5e-6);
  EXPECT_EQ(weight_g(1e5), 1.0);
}

TEST(FitLoss, Examples) {
  const EmbeddingSet emb({"w"}, Eigen::MatrixXd::Zero(3, 1));
  const auto basis = get_basis(unit_axis(3, 0), 1);
  const FitCounts one{{0}, {1.0}, 1.0};
  EXPECT_EQ(fit_loss(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1), 0.0, one, emb, basis, 0.0), 0.0);

  const Eigen::VectorXd in_span = 2.5 * unit_axis(3, 0);
  const Eigen::VectorXd b = basis.u.transpose() * in_span;
  EXPECT_NEAR(fit_loss(in_span, b, 0.3, FitCounts{}, emb, basis, 1.0), 0.0, 1e-24);
}

TEST(FitLoss, MatchesNaiveLoop) {
  auto rng = make_rng(20);
  const auto emb = random_unit_embedding(rng, 6, 30);
  const auto basis = get_basis(emb.matrix().leftCols(5), 3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto y = random_counts(rng, 30, 12);
    const Eigen::VectorXd v = gaussian_vector(rng, 6, 0.5);
    const Eigen::VectorXd b = gaussian_vector(rng, 3);
    const double z = 0.1 * trial;
    const double lambda = 0.5 * trial;
    EXPECT_NEAR(fit_loss(v, b, z, y, emb, basis, lambda),
                naive_fit_loss(v, b, z, dense_counts(y, 30), emb.matrix(), basis.u, lambda), 1e-9);
  }
}

TEST(FitLoss, ShapeMismatchIsContractError) {
  auto rng = make_rng(21);
  const auto emb = random_unit_embedding(rng, 4, 5);
  const auto basis = get_basis(emb.matrix(), 2);
  EXPECT_THROW(fit_loss(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2), 0, {}, emb, basis, 1), ContractError);
  EXPECT_THROW(fit_loss(Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(3), 0, {}, emb, basis, 1), ContractError);
}

TEST(FitGradient, MatchesCentralDifferences) {
  auto rng = make_rng(22);
  const int d = 5, k = 2;
  const auto emb = random_unit_embedding(rng, d, 25);
  const auto basis = get_basis(emb.matrix().leftCols(6), k);
  for (int point = 0; point < 20; ++point) {
    const auto y = random_counts(rng, 25, 10);
    const double lambda = 0.25 * point;
    Eigen::VectorXd flat(d + k + 1);
    flat << gaussian_vector(rng, d, 0.5), gaussian_vector(rng, k), gaussian_vector(rng, 1);
    const auto loss = [&](const Eigen::VectorXd& p) {
      return fit_loss(p.head(d), p.segment(d, k), p[d + k], y, emb, basis, lambda);
    };
    const auto g = fit_gradient(flat.head(d), flat.segment(d, k), flat[d + k], y, emb, basis, lambda);
    Eigen::VectorXd analytic(flat.size());
    analytic << g.v, g.b, g.z;
    EXPECT_LE(relative_norm_error(analytic, central_difference(loss, flat, 1e-5)), 1e-4) << point;
  }
}

TEST(FitGradient, ClosedFormCoefficientsAreStationary) {
  auto rng = make_rng(23);
  const auto emb = random_unit_embedding(rng, 6, 10);
  const auto basis = get_basis(emb.matrix().leftCols(4), 3);
  const Eigen::VectorXd v = gaussian_vector(rng, 6);
  const Eigen::VectorXd b = basis.u.transpose() * v;
  const auto g = fit_gradient(v, b, 0.0, FitCounts{}, emb, basis, 2.0);
  EXPECT_LE(g.b.norm(), 1e-12);
  // Any other b costs more.
  const double at_b = fit_loss(v, b, 0.0, FitCounts{}, emb, basis, 2.0);
  for (int i = 0; i < 5; ++i) {
    EXPECT_GT(fit_loss(v, b + 0.1 * gaussian_vector(rng, 3), 0.0, FitCounts{}, emb, basis, 2.0), at_b);
  }
}

TEST(FitLoss, LambdaZeroReducesToSquaredNormRow) {
  auto rng = make_rng(24);
  const Eigen::VectorXd target = gaussian_vector(rng, 4, 0.5);
  const Eigen::VectorXd other = gaussian_vector(rng, 4, 0.5);
  const double z = 0.4;
  for (double count : {1.0, 3.0, 7.0, 25.0}) {
    Eigen::MatrixXd both(4, 2);
    both << target, other;
    const EmbeddingSet emb({"other"}, other);
    const auto basis = get_basis(unit_axis(4, 0), 1);
    const double fit = fit_loss(target, Eigen::VectorXd::Zero(1), z, FitCounts{{0}, {count}, count}, emb, basis, 0.0);
    TrainConfig cfg;
    cfg.dim = 4;
    cfg.x_max = 10.0;
    // One stored off-diagonal cell is summed in both orientations.
    const double sn = sn_loss(both, z, CooccurrenceMatrix(2, 1, {{0, 1, count}}), cfg);
    EXPECT_NEAR(2.0 * fit, sn, 1e-12 * std::max(1.0, sn));
  }
}

TEST(CollectFitCounts, WindowMinimumCountAndWithholding) {
  const auto tokens = tokenize("t a b t c a a t b rare t");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  const EmbeddingSet emb({"a", "b", "t", "rare"}, m);
  const auto y = collect_fit_counts("t", tokens, emb, 2, 1);
  // Neighbours of t at distance 1: (a) (b, c) (a, b) (rare).  c has no vector,
  // rare occurs once.
  ASSERT_EQ(y.words.size(), 2u);
  EXPECT_EQ(emb.word(y.words[0]), "a");
  EXPECT_EQ(y.counts[0], 2.0);
  EXPECT_EQ(emb.word(y.words[1]), "b");
  EXPECT_EQ(y.counts[1], 2.0);
  // c (count 1) and rare fall below the minimum; the total keeps every word of D'.
  EXPECT_EQ(y.total, 4.0);

  const auto self = collect_fit_counts("a", tokenize("a a b"), emb, 1, 1);
  ASSERT_EQ(self.words.size(), 1u);
  EXPECT_EQ(emb.word(self.words[0]), "b");
  EXPECT_EQ(self.total, 3.0);
}

TEST(FitVector, RecoversPlantedVector) {
  auto rng = make_rng(25);
  const int d = 10;
  const auto emb = random_unit_embedding(rng, d, 200);
  const Eigen::VectorXd truth = random_unit(rng, d);
  const double z = -1.0;
  FitCounts y;
  for (WordId w = 0; w < 200; ++w) {
    y.words.push_back(w);
    y.counts.push_back(std::exp((truth + emb.vector(w)).squaredNorm() + z));
    y.total += y.counts.back();
  }
  FitConfig cfg;
  cfg.lambda = 0.0;
  cfg.epochs = 400;
  cfg.learning_rate = 0.05;
  const auto basis = get_basis(emb.matrix().leftCols(5), 3);
  const auto r = fit_vector(y, emb, basis, cfg);
  EXPECT_GT(r.vector.dot(truth), 0.99);
  EXPECT_NEAR(r.vector.norm(), 1.0, 1e-12);
  EXPECT_EQ(r.terms, 200u);
  EXPECT_LE((r.b - basis.u.transpose() * r.raw_vector).norm(), 1e-3);
}

TEST(FitVector, StrongRegularizerPullsIntoSpan) {
  auto rng = make_rng(26);
  const auto emb = random_unit_embedding(rng, 12, 40);
  const auto basis = get_basis(emb.matrix().leftCols(8), 3);
  FitCounts y{{0, 1}, {2.0, 3.0}, 5.0};
  FitConfig cfg;
  cfg.lambda = 1e6;
  cfg.epochs = 400;
  const auto r = fit_vector(y, emb, basis, cfg);
  EXPECT_LE((r.vector - basis.projector() * r.vector).norm(), 1e-3);
}

TEST(FitVector, DeterministicAndValidated) {
  auto rng = make_rng(27);
  const auto emb = random_unit_embedding(rng, 6, 20);
  const auto basis = get_basis(emb.matrix().leftCols(5), 2);
  const auto y = random_counts(rng, 20, 8);
  FitConfig cfg;
  cfg.epochs = 30;
  EXPECT_EQ(fit_vector(y, emb, basis, cfg).raw_vector, fit_vector(y, emb, basis, cfg).raw_vector);
  cfg.lambda = 0.0;
  EXPECT_THROW(fit_vector(FitCounts{}, emb, basis, cfg), ContractError);
  cfg.lambda = -1.0;
  EXPECT_THROW(fit_vector(y, emb, basis, cfg), ContractError);
  cfg.lambda = 1.0;
  cfg.min_count = 0;
  EXPECT_THROW(fit_vector(y, emb, basis, cfg), ContractError);
}

TEST(LearnVector, ErrorsAndWithholding) {
  TempDir dir;
  auto rng = make_rng(28);
  const auto emb = random_unit_embedding(rng, 5, 12);
  std::string text;
  for (int i = 0; i < 30; ++i) text += "w0 w1 w2 w3 w" + std::to_string(4 + i % 8) + "\n";
  const auto corpus = dir.write("g.txt", text);

  FitConfig cfg;
  cfg.rank = 2;
  cfg.epochs = 20;
  cfg.min_count = 1;
  const auto r = learn_vector("w0", {"c", {"w0", "w1", "w2"}}, corpus, emb, cfg);
  EXPECT_NEAR(r.vector.norm(), 1.0, 1e-12);
  EXPECT_GT(r.total_cooccurrence, 0.0);

  // Only w1 and w2 remain once w0 is withheld.
  cfg.rank = 3;
  EXPECT_THROW(learn_vector("w0", {"c", {"w0", "w1", "w2"}}, corpus, emb, cfg), ContractError);
  cfg.rank = 1;
  EXPECT_THROW(learn_vector("w0", {"c", {"w0", "nope"}}, corpus, emb, cfg), ContractError);
  EXPECT_THROW(learn_vector("w0", {"c", {"w1"}}, dir / "missing.txt", emb, cfg), IoError);
}

TEST(OrderAndCosine, SelfIsFirst) {
  auto rng = make_rng(29);
  const auto emb = random_unit_embedding(rng, 8, 50);
  const auto oc = order_and_cosine(emb.vector(17), "w17", emb);
  EXPECT_EQ(oc.order, 1u);
  EXPECT_NEAR(oc.cosine, 1.0, 1e-12);
  EXPECT_THROW(order_and_cosine(emb.vector(0), "missing", emb), ContractError);
}

TEST(OrderAndCosine, MatchesBruteForceRanking) {
  auto rng = make_rng(30);
  const auto emb = random_unit_embedding(rng, 8, 80);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd fitted = random_unit(rng, 8);
    const WordId target = trial * 3;
    std::vector<double> scores;
    for (WordId w = 0; w < 80; ++w) scores.push_back(emb.vector(w).dot(fitted));
    std::size_t order = 1;
    for (double s : scores) order += s > scores[static_cast<std::size_t>(target)];
    const auto oc = order_and_cosine(fitted, emb.word(target), emb);
    EXPECT_EQ(oc.order, order);
    EXPECT_NEAR(oc.cosine, scores[static_cast<std::size_t>(target)], 1e-12);
  }
}

TEST(OrderAndCosine, OrthogonalExceptOneNegativeMatch) {
  Eigen::MatrixXd m(3, 3);
  m << 0, 0, -1, 1, 0, 0, 0, 1, 0;
  const EmbeddingSet emb({"a", "b", "target"}, m);
  const auto oc = order_and_cosine(unit_axis(3, 0), "target", emb);
  EXPECT_EQ(oc.cosine, -1.0);
  EXPECT_EQ(oc.order, 3u);
}
