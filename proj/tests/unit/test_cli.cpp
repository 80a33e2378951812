#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "binet/event_log.hpp"
#include "binet/scores.hpp"
#include "binet/report.hpp"
#include "binet/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace binet;

namespace {

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "binet_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  // Exit status of `binet <args>`; stdout and stderr go to out.txt and err.txt.
  static int run(const std::string& args) {
    const std::string cmd = std::string("\"") + BINET_CLI_PATH + "\" " + args + " >\"" + path("out.txt") + "\" 2>\"" +
                            path("err.txt") + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string read(const std::string& name) {
    std::ifstream in(path(name), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, Version) {
  ASSERT_EQ(run("--version"), 0);
  EXPECT_EQ(read("out.txt").rfind("binet ", 0), 0u);
}

TEST_F(Cli, GenerateRandomGraphLog) {
  ASSERT_EQ(run("generate --random activities=27 attrs=1 --cases 5000 --seed 7 -o " + path("random.json")), 0)
      << read("err.txt");
  const EventLog log = load_log(path("random.json"));
  EXPECT_EQ(log.num_cases(), 5000u);
  EXPECT_EQ(log.num_attributes(), 2u);
  EXPECT_FALSE(log.is_labeled());
}

TEST_F(Cli, Pipeline) {
  ASSERT_EQ(run("generate --cases 300 --seed 1 -o " + path("clean.json")), 0) << read("err.txt");
  ASSERT_EQ(run("inject " + path("clean.json") + " --fraction 0.3 --seed 2 -o " + path("log.json") + " --records " +
                path("records.json")),
            0)
      << read("err.txt");
  const EventLog log = load_log(path("log.json"));
  ASSERT_TRUE(log.is_labeled());
  const FlagTensor mask = anomaly_mask(label_tensor(log));
  std::size_t anomalous = 0;
  for (std::size_t i = 0; i < mask.num_cases(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < mask.case_length(i); ++j) {
      for (std::size_t k = 0; k < mask.num_attributes(); ++k) any = any || mask(i, j, k);
    }
    anomalous += any ? 1 : 0;
  }
  EXPECT_EQ(anomalous, 90u);

  ASSERT_EQ(run("train " + path("log.json") + " --epochs 2 --batch 100 -o " + path("model.bin") + " --history " +
                path("history.json")),
            0)
      << read("err.txt");
  ASSERT_EQ(run("detect " + path("log.json") + " --model " + path("model.bin") + " --flags " + path("flags.json") +
                " --scores " + path("scores.json") + " --predictions " + path("pred.json")),
            0)
      << read("err.txt");
  EXPECT_EQ(load_flags(path("flags.json")).num_cases(), 300u);
  ASSERT_EQ(run("classify " + path("log.json") + " --flags " + path("flags.json") + " --predictions " +
                path("pred.json") + " -o " + path("classified.json") + " --confusion " + path("confusion.csv")),
            0)
      << read("err.txt");
  EXPECT_NE(read("classified.json").find("\"predicted\""), std::string::npos);

  ASSERT_EQ(run("detect " + path("log.json") + " --method tstide --flags " + path("tflags.json")), 0) << read("err.txt");
  ASSERT_EQ(run("evaluate " + path("log.json") + " --flags " + path("flags.json") + " --method binet_v1 --dataset a -o " +
                path("results.csv")),
            0);
  ASSERT_EQ(run("evaluate " + path("log.json") + " --flags " + path("tflags.json") +
                " --method tstide --dataset a --append -o " + path("results.csv")),
            0);
  ASSERT_EQ(run("evaluate " + path("log.json") + " --flags " + path("flags.json") + " --method binet_v1 --dataset b --append -o " +
                path("results.csv")),
            0);
  ASSERT_EQ(run("evaluate " + path("log.json") + " --flags " + path("tflags.json") +
                " --method tstide --dataset b --append -o " + path("results.csv")),
            0);
  const auto rows = parse_results_csv(read("results.csv"));
  EXPECT_EQ(rows.size(), 8u);
  ASSERT_EQ(run("rank " + path("results.csv") + " --out-dir " + path("report")), 0) << read("err.txt");
  EXPECT_TRUE(fs::exists(path("report/cd_attribute.svg")));
  EXPECT_TRUE(fs::exists(path("report/ranking_case.json")));
}

TEST_F(Cli, BestWithoutLabelsFailsWithoutOutput) {
  ASSERT_EQ(run("generate --cases 50 --seed 3 -o " + path("unlabeled.json")), 0);
  EXPECT_NE(run("detect " + path("unlabeled.json") + " --method tstide --heuristic best --flags " + path("best.json")), 0);
  EXPECT_FALSE(fs::exists(path("best.json")));
  EXPECT_NE(read("err.txt").find("\"error\":\"PreconditionError\""), std::string::npos);
}

TEST_F(Cli, MalformedInputReportsPosition) {
  std::ofstream(path("bad.json")) << "{\n  \"cases\": [\n  }";
  EXPECT_EQ(run("detect " + path("bad.json") + " --method naive --flags " + path("never.json")), 2);
  EXPECT_NE(read("err.txt").find("\"line\":3"), std::string::npos) << read("err.txt");
  EXPECT_FALSE(fs::exists(path("never.json")));
}

TEST_F(Cli, SavedConfigReproducesRun) {
  ASSERT_EQ(run("--save-config " + path("cfg.toml") + " generate --cases 40 --seed 9 --name same -o " + path("a.json")), 0)
      << read("err.txt");
  const std::string cfg = read("cfg.toml");
  EXPECT_NE(cfg.find("cases=40"), std::string::npos) << cfg;
  EXPECT_EQ(cfg.find("save-config"), std::string::npos);
  EXPECT_EQ(cfg.find("train."), std::string::npos);
  ASSERT_EQ(run("--config " + path("cfg.toml") + " generate -o " + path("b.json")), 0) << read("err.txt");
  EXPECT_EQ(read("a.json"), read("b.json"));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(run(""), 0);
  EXPECT_NE(run("detect " + path("nothing.json") + " --flags x.json"), 0);
  EXPECT_NE(run("generate --cases 0 -o " + path("zero.json")), 0);
}
