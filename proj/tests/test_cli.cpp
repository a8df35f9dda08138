#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "emoclass/cli.hpp"
#include "support.hpp"

using namespace emoclass;
using emoclass::testing::fixture;
using emoclass::testing::TempDir;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// One embedded synthetic corpus and a trained seed-0 head, shared by the suite.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    const auto corpus = emoclass::testing::make_separable_corpus(3, 64, 32, 32);
    detail::write_file(path("train.csv"), corpus.train_csv);
    detail::write_file(path("dev.csv"), corpus.dev_csv);
    detail::write_file(path("test.csv"), corpus.test_csv);
    const auto embed = run_cli({"embed-hash", "--train-csv", path("train.csv"), "--dev-csv", path("dev.csv"),
                            "--test-csv", path("test.csv"), "--language", "syn", "--out", path("emb.txt")});
    ASSERT_EQ(embed.code, 0) << embed.err;
    const auto train = run_cli({"train", "--train-csv", path("train.csv"), "--dev-csv", path("dev.csv"), "--language",
                            "syn", "--embeddings", path("emb.txt"), "--out-model", path("model"), "--seed", "0",
                            "--lr", "0.01", "--epochs", "60"});
    ASSERT_EQ(train.code, 0) << train.err;
  }

  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static std::string path(const std::string& name) { return dir_->file(name); }
  static std::string model() { return path("model/model_seed0.txt"); }

  static TempDir* dir_;
};

TempDir* CliTest::dir_ = nullptr;

}  // namespace

TEST_F(CliTest, EmbedWritesEveryKey) {
  const auto store = load_store(path("emb.txt"));
  EXPECT_EQ(store.size(), 128u);
  EXPECT_EQ(store.fingerprint(), EmbedderConfig{}.fingerprint());
  EXPECT_TRUE(store.contains("dev:31"));
}

TEST_F(CliTest, TrainWritesCheckpointAndAggregate) {
  EXPECT_TRUE(std::filesystem::exists(model()));
  const auto aggregate = detail::read_file(path("model/aggregate.txt"));
  EXPECT_EQ(aggregate.rfind("seed 0\t", 0), 0u);
  EXPECT_NE(aggregate.find("runs 1\n"), std::string::npos);
  EXPECT_EQ(load_model(model()).schema.language(), "syn");
}

TEST_F(CliTest, MissingDevCsvIsConfigError) {
  const auto r = run_cli({"train", "--train-csv", path("train.csv"), "--dev-csv", path("nope.csv"), "--embeddings",
                      path("emb.txt"), "--out-model", path("m2")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(path("nope.csv")), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(path("m2")));
}

TEST_F(CliTest, MissingEmbeddingKeyExitsFour) {
  const auto partial = run_cli({"embed-hash", "--train-csv", path("train.csv"), "--out", path("train_only.txt")});
  ASSERT_EQ(partial.code, 0) << partial.err;
  const auto r = run_cli({"train", "--train-csv", path("train.csv"), "--dev-csv", path("dev.csv"), "--embeddings",
                      path("train_only.txt"), "--out-model", path("m3"), "--epochs", "1"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("dev:0"), std::string::npos);
}

TEST_F(CliTest, SchemaMismatchExitsThree) {
  const auto hin = fixture("hin_sample.csv");
  ASSERT_EQ(run_cli({"embed-hash", "--train-csv", hin, "--dev-csv", hin, "--test-csv", fixture("eng_sample.csv"),
                 "--language", "hin", "--out", path("hin_emb.txt")})
                .code,
            3);  // the English test file does not match the Hindi schema
  ASSERT_EQ(
      run_cli({"embed-hash", "--train-csv", hin, "--dev-csv", hin, "--language", "hin", "--out", path("hin_emb.txt")}).code,
      0);
  ASSERT_EQ(run_cli({"embed-hash", "--test-csv", fixture("eng_sample.csv"), "--out", path("eng_emb.txt")}).code, 0);
  const auto train = run_cli({"train", "--train-csv", hin, "--dev-csv", hin, "--language", "hin", "--embeddings",
                          path("hin_emb.txt"), "--out-model", path("hin_model"), "--epochs", "2"});
  ASSERT_EQ(train.code, 0) << train.err;
  const auto r = run_cli({"eval", "--model", path("hin_model/model_seed0.txt"), "--test-csv", fixture("eng_sample.csv"),
                      "--embeddings", path("eng_emb.txt")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, EvalIsByteIdenticalAcrossRuns) {
  const std::vector<std::string> args{"eval", "--model", model(), "--test-csv", path("test.csv"), "--embeddings",
                                      path("emb.txt")};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("macro f1    1.0000"), std::string::npos) << a.out;

  auto json_args = args;
  json_args.insert(json_args.end(), {"--format", "json", "--out", path("eval.json")});
  const auto j = run_cli(json_args);
  ASSERT_EQ(j.code, 0) << j.err;
  const auto parsed = nlohmann::json::parse(detail::read_file(path("eval.json")));
  EXPECT_EQ(parsed["labels"].size(), 5u);
  EXPECT_EQ(parsed["macro_f1"].get<double>(), 1.0);
}

TEST_F(CliTest, PredictPrintsEveryEmotion) {
  const auto text = load_dataset(path("test.csv"), "syn", Split::test).samples[0].text;
  const auto r = run_cli({"predict", "--model", model(), "--text", text});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 5u);
  const std::vector<std::string> names{"anger", "fear", "joy", "sadness", "surprise"};
  for (std::size_t i = 0; i < 5; ++i) {
    const auto cells = detail::split(lines[i], '\t');
    ASSERT_EQ(cells.size(), 3u);
    EXPECT_EQ(cells[0], names[i]);
    EXPECT_EQ(cells[1].size(), 6u);  // 0.xxxx
    EXPECT_TRUE(cells[2] == "0" || cells[2] == "1");
  }

  const auto j = run_cli({"predict", "--model", model(), "--text", text, "--format", "json"});
  ASSERT_EQ(j.code, 0);
  EXPECT_EQ(nlohmann::json::parse(j.out).size(), 5u);
}

TEST_F(CliTest, HigherThresholdNeverAddsPositives) {
  const auto test = load_dataset(path("test.csv"), "syn", Split::test);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto lo = lines_of(run_cli({"predict", "--model", model(), "--text", test.samples[i].text}).out);
    const auto hi =
        lines_of(run_cli({"predict", "--model", model(), "--text", test.samples[i].text, "--threshold", "0.9"}).out);
    ASSERT_EQ(lo.size(), hi.size());
    for (std::size_t l = 0; l < lo.size(); ++l) {
      EXPECT_LE(detail::split(hi[l], '\t')[2], detail::split(lo[l], '\t')[2]);
    }
  }
}

TEST_F(CliTest, PredictRejectsEmptyTextAndBadThreshold) {
  EXPECT_EQ(run_cli({"predict", "--model", model(), "--text", "   "}).code, 3);
  EXPECT_EQ(run_cli({"predict", "--model", model(), "--text", "hi", "--threshold", "1.5"}).code, 2);
  EXPECT_EQ(run_cli({"predict", "--model", path("missing.txt"), "--text", "hi"}).code, 2);
}

TEST_F(CliTest, FiveSeedsGiveFiveCheckpoints) {
  const auto r = run_cli({"train", "--train-csv", path("train.csv"), "--dev-csv", path("dev.csv"), "--embeddings",
                      path("emb.txt"), "--out-model", path("five"), "--seeds", "0,1,2,3,4", "--epochs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int s = 0; s < 5; ++s) {
    EXPECT_TRUE(std::filesystem::exists(path("five/model_seed" + std::to_string(s) + ".txt"))) << s;
  }
  EXPECT_NE(detail::read_file(path("five/aggregate.txt")).find("runs 5\n"), std::string::npos);
  EXPECT_NE(r.out.find("runs 5\n"), std::string::npos);
}

TEST_F(CliTest, SeedPrecedence) {
  const std::vector<std::string> base{"train", "--train-csv", path("train.csv"), "--dev-csv", path("dev.csv"),
                                      "--embeddings", path("emb.txt"), "--epochs", "1"};
  ::setenv("EMOCLASS_SEED", "11", 1);
  auto env_args = base;
  env_args.insert(env_args.end(), {"--out-model", path("env")});
  const auto env_run = run_cli(env_args);
  detail::write_file(path("cfg.txt"), "# seeds from file\nseeds=12\n");
  auto file_args = base;
  file_args.insert(file_args.end(), {"--out-model", path("file"), "--config", path("cfg.txt")});
  const auto file_run = run_cli(file_args);
  auto flag_args = base;
  flag_args.insert(flag_args.end(), {"--out-model", path("flag"), "--config", path("cfg.txt"), "--seed", "13"});
  const auto flag_run = run_cli(flag_args);
  ::unsetenv("EMOCLASS_SEED");

  ASSERT_EQ(env_run.code, 0) << env_run.err;
  ASSERT_EQ(file_run.code, 0) << file_run.err;
  ASSERT_EQ(flag_run.code, 0) << flag_run.err;
  EXPECT_TRUE(std::filesystem::exists(path("env/model_seed11.txt")));
  EXPECT_TRUE(std::filesystem::exists(path("file/model_seed12.txt")));
  EXPECT_FALSE(std::filesystem::exists(path("file/model_seed11.txt")));
  EXPECT_TRUE(std::filesystem::exists(path("flag/model_seed13.txt")));
  EXPECT_FALSE(std::filesystem::exists(path("flag/model_seed12.txt")));
}

TEST_F(CliTest, BadConfigAndUnknownFlags) {
  detail::write_file(path("bad.txt"), "nonsense_key=1\n");
  EXPECT_EQ(run_cli({"train", "--config", path("bad.txt")}).code, 2);
  EXPECT_EQ(run_cli({"train", "--no-such-flag"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"train", "--train-csv", path("train.csv"), "--dev-csv", path("dev.csv"), "--embeddings",
                 path("emb.txt"), "--out-model", path("x"), "--lr", "0"})
                .code,
            2);
}

TEST_F(CliTest, BaselineFitEvalPredict) {
  const auto fit = run_cli({"baseline", "fit", "--kind", "gnb", "--train-csv", path("train.csv"), "--embeddings",
                        path("emb.txt"), "--out-model", path("gnb.txt")});
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_NE(fit.out.find("macro f1    1.0000"), std::string::npos) << fit.out;
  const auto eval = run_cli({"baseline", "eval", "--model", path("gnb.txt"), "--test-csv", path("test.csv"),
                         "--embeddings", path("emb.txt")});
  ASSERT_EQ(eval.code, 0) << eval.err;
  EXPECT_NE(eval.out.find("macro f1    1.0000"), std::string::npos);

  const auto sample = load_dataset(path("test.csv"), "syn", Split::test).samples[0];
  const auto pred = run_cli({"baseline", "predict", "--model", path("gnb.txt"), "--text", sample.text});
  ASSERT_EQ(pred.code, 0) << pred.err;
  const auto lines = lines_of(pred.out);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "anger\t" + std::to_string(sample.labels[0]));
  EXPECT_EQ(run_cli({"baseline", "fit", "--kind", "svm", "--train-csv", path("train.csv"), "--embeddings",
                 path("emb.txt"), "--out-model", path("svm.txt")})
                .code,
            2);
}

TEST(CliReport, TableFromFixture) {
  const auto r = run_cli({"report", "table", "--scores", fixture("scores.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.8903"), std::string::npos);
  EXPECT_NE(r.out.find("–"), std::string::npos);
  const auto j = run_cli({"report", "table", "--scores", fixture("scores.tsv"), "--format", "json"});
  ASSERT_EQ(j.code, 0) << j.err;
  EXPECT_EQ(nlohmann::json::parse(j.out).size(), 13u);
}

TEST(CliReport, LeaderboardGaps) {
  const auto r = run_cli({"report", "leaderboard", "--reference", fixture("leaderboard.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.0356"), std::string::npos);
  EXPECT_NE(r.out.find("0.0177"), std::string::npos);

  TempDir dir;
  detail::write_file(dir.file("ours.tsv"), "hin\t0.9257\n");
  const auto own = run_cli({"report", "leaderboard", "--reference", fixture("leaderboard.tsv"), "--ours", dir.file("ours.tsv")});
  ASSERT_EQ(own.code, 0) << own.err;
  EXPECT_EQ(lines_of(own.out).size(), 2u);
  EXPECT_NE(own.out.find("0.0000"), std::string::npos);

  detail::write_file(dir.file("xx.tsv"), "xx\t0.5\n");
  EXPECT_EQ(run_cli({"report", "leaderboard", "--reference", fixture("leaderboard.tsv"), "--ours", dir.file("xx.tsv")}).code,
            3);
}

TEST(CliReport, SplitStats) {
  const auto r = run_cli({"report", "stats", "--train-csv", fixture("eng_sample.csv"), "--dev-csv",
                      fixture("eng_sample.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("train\t3\n"), std::string::npos);
  EXPECT_NE(r.out.find("total\t6\n"), std::string::npos);
  EXPECT_NE(r.out.find("fear\t4\n"), std::string::npos);
}

TEST(CliExitCodes, Mapping) {
  EXPECT_EQ(cli::exit_code_for(Errc::config), 2);
  EXPECT_EQ(cli::exit_code_for(Errc::parse), 3);
  EXPECT_EQ(cli::exit_code_for(Errc::schema_mismatch), 3);
  EXPECT_EQ(cli::exit_code_for(Errc::missing_embedding), 4);
  EXPECT_EQ(cli::exit_code_for(Errc::network), 5);
  EXPECT_EQ(cli::exit_code_for(Errc::remote), 5);
}
