#include <gtest/gtest.h>

#include <sstream>

#include "radtext/annotation.hpp"
#include "radtext/cli.hpp"
#include "test_support.hpp"

using namespace radtext;
using radtext::fixture::TempDir;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run_command(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

/// Fast settings for pipeline runs on small corpora.
std::vector<std::string> fast(std::vector<std::string> args) {
  for (const char* flag : {"--dim=16", "--hidden=8", "--epochs=8", "--embed-epochs=2"}) args.emplace_back(flag);
  return args;
}

void synth(const std::filesystem::path& dir, int n = 80) {
  const auto o = run({"synth", "--n", std::to_string(n), "--r-rate", "0.5", "--nr-rate", "0.5", "--seed", "4",
                      "--out", dir.string()});
  ASSERT_EQ(o.code, 0) << o.err;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  const auto o = run({"synth", "--n", "many"});
  EXPECT_EQ(o.code, 2);
  EXPECT_FALSE(o.err.empty());
}

TEST(Cli, HelpExitsZero) {
  const auto o = run({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("synth"), std::string::npos);
}

TEST(Cli, RuntimeErrorsExitOneWithKind) {
  TempDir dir("radtext-cli");
  const auto o = run({"train", "--corpus", (dir / "missing.jsonl").string(), "--labels", (dir / "x.csv").string(),
                      "--out", dir.path().string()});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("io error"), std::string::npos) << o.err;
}

TEST(Cli, SynthWritesCorpusAndLabelLogs) {
  TempDir dir("radtext-cli");
  const auto o = run({"synth", "--n", "30", "--proportions", "0.5,0.3,0.2", "--out", dir.path().string()});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* f : {"corpus.jsonl", "gold.csv", "labels_a.csv", "labels_b.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::size_t r = 0;
  for (const auto& e : read_label_log(dir / "gold.csv")) r += e.label == Label::R;
  EXPECT_EQ(r, 15u);
}

TEST(Cli, KappaOnIdenticalLogsIsOne) {
  TempDir dir("radtext-cli");
  synth(dir.path(), 40);
  const auto a = (dir / "labels_a.csv").string();
  const auto o = run({"kappa", "--labels-a", a, "--labels-b", a, "--out", dir.path().string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("κ=1.0000"), std::string::npos) << o.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "kappa.csv"));
}

TEST(Cli, IngestCleanAndAdjudicate) {
  TempDir dir("radtext-cli");
  synth(dir.path(), 40);
  const auto out = dir.path().string();
  ASSERT_EQ(run({"ingest", "--input", (dir / "corpus.jsonl").string(), "--out", out}).code, 0);
  ASSERT_EQ(run({"clean", "--corpus", (dir / "records.jsonl").string(), "--out", out}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "tokens.jsonl"));
  const auto adj = run({"adjudicate", "--corpus", (dir / "corpus.jsonl").string(), "--labels-a",
                        (dir / "labels_a.csv").string(), "--labels-b", (dir / "labels_b.csv").string(), "--out",
                        (dir / "adj").string()});
  ASSERT_EQ(adj.code, 0) << adj.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "adj" / "gold.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "adj" / "adjudication.csv"));
}

TEST(Cli, TrainEvaluateBaselinesCompareSmoke) {
  TempDir dir("radtext-cli");
  synth(dir.path());
  const auto corpus = (dir / "corpus.jsonl").string(), labels = (dir / "gold.csv").string();
  const auto out = dir.path().string();
  auto o = run(fast({"train", "--corpus", corpus, "--labels", labels, "--out", out}));
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* f : {"model.txt", "embeddings.txt", "split.csv", "train_loss.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  o = run({"evaluate", "--corpus", corpus, "--labels", labels, "--out", out});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "predictions.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "eval_report.csv"));
  o = run({"baselines", "--corpus", corpus, "--labels", labels, "--out", out});
  ASSERT_EQ(o.code, 0) << o.err;
  o = run({"compare", "--out", out});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto table = fixture::read_text(dir / "comparison.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
  o = run({"msecurve", "--corpus", corpus, "--labels", labels, "--out", out});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "mse_curve.csv"));
  o = run({"trends", "--corpus", corpus, "--labels", labels, "--out", out});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "timeline.svg"));
}

TEST(Cli, ConfigFileWithFlagPrecedence) {
  TempDir dir("radtext-cli");
  fixture::write_text(dir / "run.ini", "[synth]\nn = 12\nmean_length = 25\nseed = 3\n");
  auto o = run({"synth", "--config", (dir / "run.ini").string(), "--out", (dir / "a").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_label_log(dir / "a" / "gold.csv").size(), 12u);
  o = run({"synth", "--config", (dir / "run.ini").string(), "--n", "7", "--out", (dir / "b").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_label_log(dir / "b" / "gold.csv").size(), 7u);
  // The config seed still applies alongside the overriding flag.
  o = run({"synth", "--n", "7", "--mean-length", "25", "--seed", "3", "--out", (dir / "c").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(fixture::read_text(dir / "b" / "corpus.jsonl"), fixture::read_text(dir / "c" / "corpus.jsonl"));
}

TEST(Cli, RerunIsByteIdenticalAndInputsUntouched) {
  TempDir dir("radtext-cli");
  synth(dir.path());
  const auto corpus = (dir / "corpus.jsonl").string(), labels = (dir / "gold.csv").string();
  const auto corpus_before = fixture::read_text(corpus), labels_before = fixture::read_text(labels);
  for (const char* sub : {"r1", "r2"}) {
    const auto out = (dir / sub).string();
    ASSERT_EQ(run(fast({"train", "--corpus", corpus, "--labels", labels, "--seed", "7", "--out", out})).code, 0);
    ASSERT_EQ(run({"evaluate", "--corpus", corpus, "--labels", labels, "--out", out}).code, 0);
    ASSERT_EQ(run({"baselines", "--corpus", corpus, "--labels", labels, "--seed", "7", "--out", out}).code, 0);
  }
  for (const char* f : {"model.txt", "embeddings.txt", "split.csv", "train_loss.csv", "predictions.csv",
                        "eval_report.csv", "baselines.csv"}) {
    EXPECT_EQ(fixture::read_text(dir / "r1" / f), fixture::read_text(dir / "r2" / f)) << f;
  }
  EXPECT_EQ(fixture::read_text(corpus), corpus_before);
  EXPECT_EQ(fixture::read_text(labels), labels_before);
}

TEST(Cli, SweepWritesOneRowPerRatio) {
  TempDir dir("radtext-cli");
  synth(dir.path());
  const auto o = run(fast({"sweep", "--corpus", (dir / "corpus.jsonl").string(), "--labels",
                           (dir / "gold.csv").string(), "--out", dir.path().string()}));
  ASSERT_EQ(o.code, 0) << o.err;
  const auto csv = fixture::read_text(dir / "sweep.csv");
  EXPECT_EQ(csv.rfind("ratio,accuracy,train,test\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(Cli, GradcheckPassesAndCatchesMutation) {
  TempDir dir("radtext-cli");
  auto o = run({"gradcheck", "--out", dir.path().string()});
  EXPECT_EQ(o.code, 0) << o.out << o.err;
  EXPECT_NE(o.out.find("pass"), std::string::npos);
  o = run({"gradcheck", "--mutate", "--out", dir.path().string()});
  EXPECT_EQ(o.code, 0) << o.out << o.err;
  const auto csv = fixture::read_text(dir / "gradcheck.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}
