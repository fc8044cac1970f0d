#include "subkb/kb_extend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_set>

#include "subkb/errors.hpp"
#include "subkb/parallel.hpp"
#include "subkb/random.hpp"

namespace subkb {

namespace {

constexpr const char* kModule = "kb_extend";

std::vector<WordId> member_ids(const std::vector<std::string>& words, const EmbeddingSet& emb) {
  std::vector<WordId> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(emb.require(w));
  return ids;
}

void check_delta(double delta, const char* what) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw ContractError(kModule, std::string(what) + " threshold must lie in [0, 1]");
  }
}

// Basis of a word set plus the coordinates of every vocabulary vector in it.
struct ProjectedCategory {
  SubspaceBasis basis;
  Eigen::MatrixXd coords;  // k x |vocab|
  std::vector<bool> member;
};

ProjectedCategory project_category(const std::vector<WordId>& ids, const EmbeddingSet& emb, int rank) {
  if (ids.empty()) throw ContractError(kModule, "cannot extend an empty set");
  ProjectedCategory out{get_basis(emb.gather(ids), rank), {}, std::vector<bool>(emb.size(), false)};
  out.coords = out.basis.u.transpose() * emb.matrix();
  for (auto id : ids) out.member[static_cast<std::size_t>(id)] = true;
  return out;
}

std::vector<CategoryCandidate> select_words(const ProjectedCategory& cat, const EmbeddingSet& emb, double delta) {
  std::vector<CategoryCandidate> items;
  for (Eigen::Index w = 0; w < cat.coords.cols(); ++w) {
    if (cat.member[static_cast<std::size_t>(w)]) continue;
    if (!(cat.coords(0, w) > 0.0)) continue;
    const double projection = cat.coords.col(w).norm();
    if (projection > delta) items.push_back({emb.word(static_cast<WordId>(w)), projection});
  }
  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
    return x.projection != y.projection ? x.projection > y.projection : x.word < y.word;
  });
  return items;
}

// Everything of a relation extension that does not depend on the thresholds.
struct RelationContext {
  ProjectedCategory left;
  ProjectedCategory right;
  SubspaceBasis basis;
  Eigen::MatrixXd coords;  // k_r x |vocab|, relation-basis coordinates of every vector
  std::set<WordPair> known;
};

RelationContext prepare_relation(const RelationSet& set, const EmbeddingSet& emb, int rank_left, int rank_right,
                                 int rank_relation) {
  if (set.pairs.empty()) throw ContractError(kModule, "cannot extend an empty relation");
  RelationContext ctx{project_category(member_ids(set.left(), emb), emb, rank_left),
                      project_category(member_ids(set.right(), emb), emb, rank_right),
                      get_basis(relation_vectors(set, emb), rank_relation),
                      {},
                      {set.pairs.begin(), set.pairs.end()}};
  ctx.coords = ctx.basis.u.transpose() * emb.matrix();
  return ctx;
}

RelationExtension select_pairs(const RelationContext& ctx, const EmbeddingSet& emb, double delta_left,
                               double delta_right, double delta_relation, std::size_t max_pairs) {
  check_delta(delta_left, "left category");
  check_delta(delta_right, "right category");
  if (!(delta_relation >= 0.0)) throw ContractError(kModule, "relation threshold must be non-negative");

  RelationExtension out;
  out.left = {select_words(ctx.left, emb, delta_left), ctx.left.basis};
  out.right = {select_words(ctx.right, emb, delta_right), ctx.right.basis};
  out.basis = ctx.basis;

  const std::size_t candidates = out.left.items.size() * out.right.items.size();
  if (candidates > max_pairs) {
    throw ContractError(kModule, std::to_string(candidates) + " candidate pairs exceed the cap of " +
                                     std::to_string(max_pairs) + "; raise the category thresholds");
  }

  std::vector<WordId> right_ids;
  right_ids.reserve(out.right.items.size());
  for (const auto& c : out.right.items) right_ids.push_back(emb.require(c.word));

  for (const auto& a : out.left.items) {
    const WordId ia = emb.require(a.word);
    for (std::size_t j = 0; j < right_ids.size(); ++j) {
      const Eigen::VectorXd diff = ctx.coords.col(ia) - ctx.coords.col(right_ids[j]);
      if (!(diff[0] > 0.0)) continue;
      const double projection = diff.norm();
      if (!(projection > delta_relation)) continue;
      const auto& b = out.right.items[j].word;
      if (ctx.known.count({a.word, b})) continue;
      out.items.push_back({a.word, b, projection});
    }
  }
  std::sort(out.items.begin(), out.items.end(), [](const auto& x, const auto& y) {
    if (x.projection != y.projection) return x.projection > y.projection;
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return out;
}

}  // namespace

CategoryExtension extend_category(const CategorySet& set, const EmbeddingSet& emb, int rank, double delta) {
  check_delta(delta, "category");
  const auto cat = project_category(member_ids(set.members, emb), emb, rank);
  return {select_words(cat, emb, delta), cat.basis};
}

RelationExtension extend_relation(const RelationSet& set, const EmbeddingSet& emb, const RelationExtendConfig& cfg) {
  const auto ctx = prepare_relation(set, emb, cfg.rank_left, cfg.rank_right, cfg.rank_relation);
  return select_pairs(ctx, emb, cfg.delta_left, cfg.delta_right, cfg.delta_relation, cfg.max_candidate_pairs);
}

RelationExperimentResult relation_accuracy_experiment(const RelationSet& set, const EmbeddingSet& emb,
                                                      const RelationExperimentConfig& cfg) {
  const std::size_t n = set.pairs.size();
  if (n < 4) throw ContractError(kModule, "relation '" + set.name + "' needs at least 4 pairs");
  if (cfg.ranks.empty() || cfg.deltas.empty()) throw ContractError(kModule, "no ranks or thresholds requested");
  if (cfg.trials < 1) throw ContractError(kModule, "trials must be >= 1");
  const auto [n_train, n_test] = split_sizes(n, cfg.train_fraction);
  if (n_train == 0 || n_test == 0) {
    throw ContractError(kModule, "split of relation '" + set.name + "' leaves an empty part");
  }

  struct Cell {
    std::size_t correct = 0;
    std::size_t incorrect = 0;
    bool scored = false;
    double accuracy = 0.0;
  };
  const std::size_t cells = cfg.ranks.size() * cfg.deltas.size();
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<Cell>> outcome(trials, std::vector<Cell>(cells));

  parallel_for(trials, cfg.threads, [&](std::size_t t) {
    auto rng = make_rng(cfg.seed, {streams::kRelationTrial, t});
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    RelationSet train{set.name, {}};
    std::set<WordPair> held_out;
    std::unordered_set<std::string> held_left, held_right;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = set.pairs[perm[i]];
      if (i < n_train) {
        train.pairs.push_back(p);
      } else {
        held_out.insert(p);
        held_left.insert(p.first);
        held_right.insert(p.second);
      }
    }

    for (std::size_t r = 0; r < cfg.ranks.size(); ++r) {
      const int k = cfg.ranks[r];
      const auto ctx = prepare_relation(train, emb, k, k, k);
      for (std::size_t q = 0; q < cfg.deltas.size(); ++q) {
        const double delta = cfg.deltas[q];
        const auto ext = select_pairs(ctx, emb, delta, delta, delta, cfg.max_candidate_pairs);
        Cell& cell = outcome[t][r * cfg.deltas.size() + q];
        for (const auto& item : ext.items) {
          if (!held_left.count(item.a) && !held_right.count(item.b)) continue;
          if (held_out.count({item.a, item.b})) {
            ++cell.correct;
          } else {
            ++cell.incorrect;
          }
        }
        const std::size_t answered = cell.correct + cell.incorrect;
        cell.scored = answered > 0;
        if (cell.scored) cell.accuracy = static_cast<double>(cell.correct) / static_cast<double>(answered);
      }
    }
  });

  RelationExperimentResult result;
  for (std::size_t r = 0; r < cfg.ranks.size(); ++r) {
    for (std::size_t q = 0; q < cfg.deltas.size(); ++q) {
      RelationExperimentRow row;
      row.rank = cfg.ranks[r];
      row.delta = cfg.deltas[q];
      double sum = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const Cell& cell = outcome[t][r * cfg.deltas.size() + q];
        row.correct += cell.correct;
        row.incorrect += cell.incorrect;
        if (cell.scored) {
          ++row.scored_trials;
          sum += cell.accuracy;
        } else {
          ++row.empty_trials;
        }
      }
      row.mean_accuracy = row.scored_trials > 0 ? sum / static_cast<double>(row.scored_trials)
                                                : std::numeric_limits<double>::quiet_NaN();
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace subkb
