#include "qtanneal/cli.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtanneal/history.h"
#include "qtanneal/qtable.h"
#include "test_util.h"

namespace qtanneal {
namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult RunTool(std::vector<std::string> args) {
  args.insert(args.begin(), "qtanneal");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strips '#' lines so the rest parses as a plain table.
std::string Body(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string body;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') body += line + "\n";
  }
  return body;
}

TEST(CliTest, ScalePrintsHeaderAndTable) {
  const CliResult r = RunTool({"scale", "--quality", "50"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("# qtanneal ", 0), 0u);
  EXPECT_NE(r.out.find("# quality = 50"), std::string::npos);
  EXPECT_EQ(ParseTable(Body(r.out)).table, StandardTable());
}

TEST(CliTest, ScoreEmitsOneCsvLine) {
  const std::string ref = testing::DataPath("metric_pairs/blur_ref.pgm");
  const CliResult r = RunTool({"score", "--metric", "ssim", "--ref", ref, "--test", ref});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "SSIM," + ref + "," + ref + ",1.0\n");
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(RunTool({}).code, kExitUsageError);
  EXPECT_EQ(RunTool({"bogus"}).code, kExitUsageError);
  EXPECT_EQ(RunTool({"scale", "--quality", "0"}).code, kExitUsageError);
  EXPECT_EQ(RunTool({"--help"}).code, kExitOk);
  EXPECT_EQ(RunTool({"--version"}).code, kExitOk);
  // Missing seed is a usage error.
  EXPECT_EQ(RunTool({"anneal", "--images", "x.pgm", "--out", "h.jsonl"}).code, kExitUsageError);
  // Unknown metric names and unreadable tables are domain errors.
  const std::string ref = testing::DataPath("metric_pairs/blur_ref.pgm");
  EXPECT_EQ(RunTool({"score", "--metric", "vif", "--ref", ref, "--test", ref}).code, kExitDomainError);
  testing::TempDir dir("cli_codes");
  std::ofstream(dir / "bad.txt") << "1 2 3\n";
  const CliResult bad = RunTool({"scale", "--table", (dir / "bad.txt").string()});
  EXPECT_EQ(bad.code, kExitDomainError);
  EXPECT_FALSE(bad.err.empty());
}

TEST(CliTest, EncodeWritesJfif) {
  testing::TempDir dir("cli_encode");
  SavePgm(testing::SyntheticImage(40, 24, 3), dir / "in.pgm");
  const CliResult r = RunTool({"encode", "--in", (dir / "in.pgm").string(), "--out",
                           (dir / "o.jpg").string(), "--recon", (dir / "r.pgm").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string jpg = Slurp(dir / "o.jpg");
  EXPECT_EQ(r.out, (dir / "o.jpg").string() + "," + std::to_string(jpg.size()) + "\n");
  EXPECT_EQ(LoadImage(dir / "r.pgm").width(), 40);
}

TEST(CliTest, DiffOfStandardAgainstItselfIsZero) {
  const CliResult r = RunTool({"diff"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("   0    0    0    0    0    0    0    0\n"), std::string::npos);
}

class CliAnnealTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (int i = 0; i < 2; ++i) {
      SavePgm(testing::SyntheticImage(48, 48, 100 + i), dir_ / ("img" + std::to_string(i) + ".pgm"));
    }
  }
  std::vector<std::string> Anneal(const std::string& out) {
    return {"anneal", "--images", dir_.path().string(), "--metric", "ssim", "--steps", "30",
            "--seed", "12345", "--out", out};
  }
  testing::TempDir dir_{"cli_anneal"};
};

TEST_F(CliAnnealTest, RepeatedRunsAreByteIdentical) {
  const std::string a = (dir_ / "a.jsonl").string();
  const std::string b = (dir_ / "b.jsonl").string();
  ASSERT_EQ(RunTool(Anneal(a)).code, kExitOk);
  ASSERT_EQ(RunTool(Anneal(b)).code, kExitOk);
  EXPECT_EQ(Slurp(a), Slurp(b));
  const History h = LoadHistory(a);
  EXPECT_EQ(h.records.size(), 30u);
  EXPECT_EQ(h.config.seed, 12345u);
  EXPECT_EQ(h.config.training_images.size(), 2u);
}

TEST_F(CliAnnealTest, ConfigFileSectionsAndFlagPrecedence) {
  std::ofstream(dir_ / "c.ini") << "[anneal]\nquality = 90\nmetric = msssim\nsteps = 7\n"
                                   "[scale]\nquality = 10\n";
  const std::string config = (dir_ / "c.ini").string();
  const std::string out = (dir_ / "h.jsonl").string();
  ASSERT_EQ(RunTool({"--config", config, "anneal", "--images", dir_.path().string(), "--metric", "ssim",
                 "--seed", "1", "--out", out})
                .code,
            kExitOk);
  const History h = LoadHistory(out);
  EXPECT_EQ(h.config.quality, 90);
  EXPECT_EQ(h.config.metric, MetricId::kSsim);
  EXPECT_EQ(h.records.size(), 7u);

  const CliResult scale = RunTool({"--config", config, "scale"});
  ASSERT_EQ(scale.code, kExitOk);
  EXPECT_EQ(ParseTable(Body(scale.out)).table, ScaleTable(StandardTable(), 10));
}

TEST_F(CliAnnealTest, PartitionAnnealEvaluateSelectPipeline) {
  for (int i = 2; i < 8; ++i) {
    SavePgm(testing::SyntheticImage(48, 48, 100 + i), dir_ / ("img" + std::to_string(i) + ".pgm"));
  }
  const std::string manifest = (dir_ / "p.json").string();
  ASSERT_EQ(RunTool({"partition", "--images", dir_.path().string(), "--group-size", "2",
                 "--eval-count", "2", "--seed", "5", "--out", manifest})
                .code,
            kExitOk);
  const std::string runs = (dir_ / "runs").string();
  ASSERT_EQ(RunTool({"anneal", "--partition", manifest, "--runs", "2", "--parallelism", "2",
                 "--metric", "ssim", "--steps", "10", "--seed", "3", "--out", runs})
                .code,
            kExitOk);
  const auto summary = nlohmann::json::parse(Slurp(dir_ / "runs" / "runs.json"));
  EXPECT_EQ(summary.at("runs").size(), 2u);
  EXPECT_EQ(summary.at("ranking").size(), 2u);

  const std::string records = (dir_ / "records.json").string();
  const CliResult ev = RunTool({"evaluate", "--history", runs + "/run_000.jsonl", runs + "/run_001.jsonl",
                            "--partition", manifest, "--samples", "4", "--out", records});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  EXPECT_NE(ev.out.find("run,step,train_E,train_C,eval_E,eval_C\n"), std::string::npos);

  // Ten steps rarely buy a 10% error drop; either outcome has a defined code.
  const CliResult sel = RunTool({"select", "--records", records, "--min-improvement", "0.0"});
  const CliResult strict = RunTool({"select", "--records", records, "--min-improvement", "0.99"});
  EXPECT_EQ(strict.code, kExitDomainError);
  EXPECT_FALSE(strict.err.empty());
  EXPECT_TRUE(sel.code == kExitOk || sel.code == kExitDomainError);
}

TEST_F(CliAnnealTest, TimingCsvColumns) {
  const CliResult r = RunTool({"timing", "--tables", "standard", "--images", dir_.path().string(),
                           "--repetitions", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("table,mean_s,stddev_s,diff_s,pooled_sd,significant\n"), std::string::npos);
  EXPECT_EQ(RunTool({"timing", "--tables", "standard", "--images", dir_.path().string(),
                 "--repetitions", "2"})
                .code,
            kExitUsageError);
}

}  // namespace
}  // namespace qtanneal
