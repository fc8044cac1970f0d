#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "subkb/analogy.hpp"
#include "subkb/corpus.hpp"
#include "subkb/random.hpp"
#include "subkb/sn_trainer.hpp"
#include "subkb/subspace.hpp"

namespace {

std::vector<subkb::WordId> zipf_tokens(std::size_t n, std::size_t vocab) {
  auto rng = subkb::make_rng(3);
  std::vector<double> w(vocab);
  for (std::size_t i = 0; i < vocab; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::vector<subkb::WordId> out(n);
  for (auto& t : out) t = pick(rng);
  return out;
}

std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

void BM_CountCooccurrences(benchmark::State& state) {
  const auto tokens = zipf_tokens(static_cast<std::size_t>(state.range(0)), 5000);
  for (auto _ : state) {
    auto cooc = subkb::count_cooccurrences(tokens, 5000, {10, 1});
    benchmark::DoNotOptimize(cooc.nonzeros());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CountCooccurrences)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_GetBasis(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  auto rng = subkb::make_rng(5);
  std::normal_distribution<double> g;
  Eigen::MatrixXd cols(300, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < 300; ++i) cols(i, j) = g(rng);
  }
  for (auto _ : state) {
    auto basis = subkb::get_basis(cols, 10);
    benchmark::DoNotOptimize(basis.u.data());
  }
}
BENCHMARK(BM_GetBasis)->Arg(50)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SolveQuery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto rng = subkb::make_rng(7);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(300, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < 300; ++i) m(i, j) = g(rng);
  }
  m.colwise().normalize();
  const subkb::EmbeddingSet emb(labels(n), m);
  for (auto _ : state) {
    auto ans = subkb::solve_query("w1", "w2", "w3", 10, emb);
    benchmark::DoNotOptimize(ans.data());
  }
}
BENCHMARK(BM_SolveQuery)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_SnEpoch(benchmark::State& state) {
  const std::size_t vocab = 2000;
  const auto tokens = zipf_tokens(200'000, vocab);
  const auto cooc = subkb::count_cooccurrences(tokens, vocab, {10, 1});
  subkb::TrainConfig cfg;
  cfg.dim = static_cast<int>(state.range(0));
  cfg.epochs = 1;
  for (auto _ : state) {
    auto emb = subkb::train_sn(labels(vocab), cooc, cfg);
    benchmark::DoNotOptimize(emb.matrix().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cooc.nonzeros()));
}
BENCHMARK(BM_SnEpoch)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
