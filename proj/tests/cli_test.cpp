#include <gtest/gtest.h>

#include <sstream>

#include "csv.hpp"
#include "manifest.hpp"
#include "ranges.hpp"
#include "subkb/cli/cli.hpp"
#include "subkb/embedding.hpp"
#include "subkb/errors.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

using namespace subkb;
using subkb::testing::slurp;
using subkb::testing::TempDir;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.status = cli::dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string s(const std::filesystem::path& p) { return p.string(); }

}  // namespace

TEST(Cli, CountWritesCoocVocabAndManifest) {
  TempDir dir;
  const auto corpus = dir.write("tiny.txt", "a b a c\n");
  const auto r = run({"count", "--corpus", s(corpus), "--min-count", "1", "--window", "2", "--out", s(dir / "c.cooc")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(dir / "c.cooc").rfind("COOC v1 3 2\n", 0), 0u);
  EXPECT_EQ(slurp(dir / "c.cooc.vocab"), "a\t2\nb\t1\nc\t1\n");

  const auto m = cli::load_manifest(dir / "c.cooc.manifest.json");
  EXPECT_EQ(m.command, "count");
  EXPECT_EQ(m.parameters.at("--window"), "2");
  ASSERT_EQ(m.inputs.size(), 1u);
  EXPECT_EQ(m.inputs[0].sha256, cli::sha256_file(corpus));
  EXPECT_EQ(m.outputs.size(), 2u);
}

TEST(Cli, Sha256KnownValue) {
  TempDir dir;
  EXPECT_EQ(cli::sha256_file(dir.write("abc", "abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, MissingInputNamesPath) {
  TempDir dir;
  const auto r = run({"train", "--cooc", s(dir / "missing.file"), "--dim", "4", "--out", s(dir / "v.txt")});
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_NE(r.err.find("missing.file"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, UnknownSubcommandPrintsUsage) {
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("unknown subcommand 'frobnicate'"), std::string::npos);
  for (const auto& name : cli::subcommand_names()) EXPECT_NE(r.err.find(name), std::string::npos) << name;
  EXPECT_EQ(run({}).status, 2);
}

TEST(Cli, BadFlagIsUsageError) {
  const auto r = run({"count", "--corpus", "x", "--out", "y", "--window", "seven"});
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(r.err.rfind("error: cli: ", 0), 0u);
}

TEST(Cli, ContractViolationReportsModule) {
  TempDir dir;
  const auto corpus = dir.write("tiny.txt", "a b a c\n");
  const auto r = run({"count", "--corpus", s(corpus), "--window", "0", "--out", s(dir / "c.cooc")});
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.err.rfind("error: corpus: ", 0), 0u) << r.err;
}

TEST(Cli, PipelineOnThousandTokenCorpus) {
  TempDir dir;
  subkb::testing::DeskCorpusSpec spec;
  spec.tokens = 1000;
  spec.categories = 2;
  spec.words_per_category = 8;
  spec.background_words = 30;
  spec.latent_dim = 8;
  const auto corpus = subkb::testing::desk_corpus(spec);
  subkb::testing::write_tokens(corpus.tokens, s(dir / "corpus.txt"));
  save_category(corpus.categories[0], dir / "cat.txt");

  auto r = run({"count", "--corpus", s(dir / "corpus.txt"), "--min-count", "2", "--window", "3", "--out",
                s(dir / "c.cooc")});
  ASSERT_EQ(r.status, 0) << r.err;
  r = run({"train", "--cooc", s(dir / "c.cooc"), "--dim", "8", "--lr", "0.05", "--epochs", "20", "--seed", "3",
           "--out", s(dir / "vec.txt")});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto emb = load_vectors(dir / "vec.txt");
  EXPECT_EQ(emb.dim(), 8u);
  EXPECT_TRUE(emb.is_unit_norm(1e-5));

  r = run({"basis", "--vectors", s(dir / "vec.txt"), "--category", s(dir / "cat.txt"), "--rank", "2"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.rfind("direction,singular_value,x1,", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);

  r = run({"extend-category", "--vectors", s(dir / "vec.txt"), "--category", s(dir / "cat.txt"), "--rank", "2",
           "--delta", "0.3", "--out", s(dir / "ext.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(dir / "ext.csv").rfind("item,projection\n", 0), 0u);
  EXPECT_TRUE(std::filesystem::exists(dir / "ext.csv.manifest.json"));
}

TEST(Cli, LoaderWarningsReachStderr) {
  TempDir dir;
  save_vectors(EmbeddingSet({"a", "b", "c", "d"}, Eigen::MatrixXd::Identity(4, 4)), dir / "v.txt");
  const auto cat = dir.write("cat.txt", "a\nb\nc\nx\ny\n");
  auto r = run({"extend-category", "--vectors", s(dir / "v.txt"), "--category", s(cat), "--rank", "1", "--delta",
                "0.5"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.err.find("dropped 2"), std::string::npos);

  const auto rel = dir.write("rel.txt", "a b\nc d\na b\n");
  r = run({"extend-relation", "--vectors", s(dir / "v.txt"), "--relation", s(rel), "--ranks", "1,1,1", "--deltas",
           "0.5,0.5,0.5"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.err.find("duplicate"), std::string::npos);
  EXPECT_EQ(r.out.rfind("a,b,projection\n", 0), 0u);
}

TEST(Cli, AnalogyFilterNeedsTags) {
  TempDir dir;
  const auto grid = subkb::testing::analogy_grid(1);
  save_vectors(grid.emb, dir / "v.txt");
  save_tags(grid.tags, dir / "tags.tsv");
  const auto& p = grid.relation.pairs;
  auto r = run({"analogy", "--vectors", s(dir / "v.txt"), p[0].first, p[0].second, p[1].first, "--filter", "lex"});
  EXPECT_EQ(r.status, 1);
  r = run({"analogy", "--vectors", s(dir / "v.txt"), p[0].first, p[0].second, p[1].first, "--n", "1", "--filter",
           "lex", "--tags", s(dir / "tags.tsv")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.rfind("word,cosine\n" + p[1].second + ",", 0), 0u) << r.out;
}

TEST(Cli, AnalogyBenchmarkCsv) {
  TempDir dir;
  const auto grid = subkb::testing::analogy_grid(2);
  save_vectors(grid.emb, dir / "v.txt");
  save_tags(grid.tags, dir / "tags.tsv");
  save_relation(grid.relation, dir / "grid.txt");
  const auto r = run({"analogy-benchmark", "--vectors", s(dir / "v.txt"), "--relation", s(dir / "grid.txt"),
                      "--tags", s(dir / "tags.tsv"), "--ns", "1,5", "--out", s(dir / "b.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto text = slurp(dir / "b.csv");
  EXPECT_EQ(text.rfind("relation,N,mode,correct,total,accuracy\ngrid,1,none,90,90,1\n", 0), 0u) << text;
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
}

TEST(Cli, ReplayIsByteIdentical) {
  TempDir dir;
  const auto rel = subkb::testing::planted_offset_relation(4);
  save_vectors(rel.emb, dir / "v.txt");
  save_relation(rel.relation, dir / "rel.txt");
  auto r = run({"relation-experiment", "--vectors", s(dir / "v.txt"), "--relation", s(dir / "rel.txt"), "--ranks",
                "1..2", "--deltas", "0.4:0.1:0.6", "--trials", "5", "--seed", "9", "--threads", "3", "--out",
                s(dir / "r.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(dir / "r.csv").rfind("rank,delta,mean_accuracy,scored_trials,empty_trials,correct,incorrect\n"
                                       "1,0.4,",
                                       0),
            0u);
  const auto m = cli::load_manifest(dir / "r.csv.manifest.json");
  EXPECT_EQ(m.seed, 9u);
  EXPECT_EQ(m.threads, 3);

  r = run({"replay", "--manifest", s(dir / "r.csv.manifest.json"), "--out", s(dir / "again.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(dir / "again.csv"), slurp(dir / "r.csv"));
  EXPECT_EQ(cli::load_manifest(dir / "again.csv.manifest.json").threads, 1);
}

TEST(Cli, ReplayRejectsChangedInput) {
  TempDir dir;
  const auto corpus = dir.write("tiny.txt", "a b a c\n");
  ASSERT_EQ(run({"count", "--corpus", s(corpus), "--min-count", "1", "--out", s(dir / "c.cooc")}).status, 0);
  dir.write("tiny.txt", "a b a d\n");
  const auto r = run({"replay", "--manifest", s(dir / "c.cooc.manifest.json")});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("changed"), std::string::npos);
}

TEST(Cli, LearnVectorEmitsLineAndCsv) {
  TempDir dir;
  const auto grid = subkb::testing::planted_category(5, 10, 12, 12, 0.05);
  save_vectors(grid.emb, dir / "v.txt");
  save_category({"cat", grid.members}, dir / "cat.txt");
  std::string text;
  for (int i = 0; i < 40; ++i) text += grid.members[0] + " " + grid.members[1 + i % 5] + " " + grid.distractors[0] + "\n";
  dir.write("small.txt", text);
  const auto r = run({"learn-vector", "--vectors", s(dir / "v.txt"), "--word", grid.members[0], "--category",
                      s(dir / "cat.txt"), "--corpus", s(dir / "small.txt"), "--rank", "2", "--lambda", "1",
                      "--epochs", "50", "--min-count", "1", "--window", "2", "--withhold"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(r.out);
  std::string vec, header, values;
  std::getline(lines, vec);
  std::getline(lines, header);
  std::getline(lines, values);
  EXPECT_EQ(vec.rfind(grid.members[0] + " ", 0), 0u);
  EXPECT_EQ(std::count(vec.begin(), vec.end(), ' '), 10);
  EXPECT_EQ(header, "order,cosine,Y_total");
  EXPECT_EQ(std::count(values.begin(), values.end(), ','), 2);
}

TEST(Cli, CaptureExperimentWithDirections) {
  TempDir dir;
  auto rng = make_rng(6);
  const auto members = subkb::testing::planted_subspace_members(rng, 12, 2, 30, 0.05);
  const auto words = subkb::testing::numbered_words("m", 30);
  save_vectors(EmbeddingSet(words, members), dir / "v.txt");
  save_category({"c", words}, dir / "c.txt");
  const auto r = run({"capture-experiment", "--vectors", s(dir / "v.txt"), "--category", s(dir / "c.txt"),
                      "--ranks", "1..3", "--trials", "4", "--min-size", "20", "--out", s(dir / "cap.csv"),
                      "--directions", s(dir / "dirs.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(dir / "cap.csv").rfind("rank,mean_capture,stddev\n1,", 0), 0u);
  const auto dirs = slurp(dir / "dirs.csv");
  // 4 trials x 9 held-out members x 3 directions
  EXPECT_EQ(std::count(dirs.begin(), dirs.end(), '\n'), 1 + 4 * 9 * 3);
}

TEST(CliFormat, CsvQuoting) {
  EXPECT_EQ(cli::csv_field("plain"), "plain");
  EXPECT_EQ(cli::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(cli::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(cli::csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(cli::format_real(0.1), "0.1");
  EXPECT_EQ(cli::format_real(1.0), "1");
  EXPECT_EQ(cli::format_real(-0.0), "0");
}

TEST(CliFormat, RangeLists) {
  EXPECT_EQ(cli::parse_int_list("1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(cli::parse_int_list("1,5,10"), (std::vector<int>{1, 5, 10}));
  const auto d = cli::parse_real_list("0.4:0.05:0.75");
  ASSERT_EQ(d.size(), 8u);
  EXPECT_EQ(d[3], 0.55);
  EXPECT_EQ(d.back(), 0.75);
  EXPECT_THROW(cli::parse_int_list("3..1"), ContractError);
  EXPECT_THROW(cli::parse_real_list("0.4:0:1"), ContractError);
  EXPECT_THROW(cli::parse_int_list("x"), ContractError);
}
