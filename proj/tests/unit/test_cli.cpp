#include <sys/wait.h>

#include <cstdio>

#include <gtest/gtest.h>
#include <json.hpp>

#include "support/testdata.hpp"

using stabx::testing::TempDir;
using stabx::testing::write_text;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(STABX_CLI) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = ::pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

void write_toy(const std::filesystem::path& path) {
  const auto d = stabx::testing::linear_regression_data(30, {1.0, 0.5}, 4, 0.2, 2);
  stabx::write_csv(d, path, "y");
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("pipeline /nonexistent/config.json").code, 1);
  EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, ConfigProblemsExitOne) {
  TempDir dir;
  write_text(dir / "c.json", R"({"seed": 1, "datasets": [], "methods": [], "bogus": 1})");
  EXPECT_EQ(run("pipeline " + (dir / "c.json").string()).code, 1);
  write_text(dir / "bad.json", "{ not json");
  EXPECT_EQ(run("pipeline " + (dir / "bad.json").string()).code, 1);
}

TEST(Cli, PerturbWritesPlan) {
  const auto o = run("perturb -n 10 --kind subsample --ratio 0.5 --repeats 3 --seed 4");
  ASSERT_EQ(o.code, 0);
  const auto doc = nlohmann::json::parse(o.out);
  EXPECT_EQ(doc.at("kind"), "subsample");
  EXPECT_EQ(doc.at("repeats").size(), 3u);
  EXPECT_EQ(run("perturb -n 10 --kind subsample --ratio 0.5 --repeats 3 --seed 4").out, o.out);
  EXPECT_EQ(run("perturb -n 3 --kind split --ratio 0.01").code, 1);
}

TEST(Cli, ScoreEmptyDirectoryExitsOne) {
  TempDir dir;
  EXPECT_EQ(run("score " + dir.path().string()).code, 1);
}

TEST(Cli, PipelineScoreAndReport) {
  TempDir dir;
  write_toy(dir / "toy.csv");
  write_text(dir / "c.json", R"({"output_dir": "run", "seed": 2,
    "datasets": [{"id": "toy", "path": "toy.csv", "task": "regression", "target": "y"}],
    "methods": [{"id": "ridge", "builtin": "ridge"},
                {"id": "wrapped", "command": [")" STABX_BUILTIN_RUNNER R"("], "task": "feature_importance"}],
    "perturbation": {"repeats": 3}})");
  const auto o = run("-q pipeline " + (dir / "c.json").string());
  ASSERT_EQ(o.code, 0);
  const auto run_dir = dir / "run";
  EXPECT_TRUE(std::filesystem::exists(run_dir / "report" / "index.json"));
  EXPECT_EQ(run("-q score " + run_dir.string() + " -k 2 --rank-metric kendall -o " + (dir / "s").string()).code, 0);
  const auto table = stabx::testing::read_text(dir / "s" / "within_feature_importance.csv");
  EXPECT_NE(table.find("kendall@2"), std::string::npos) << table;
  EXPECT_EQ(run("-q report " + run_dir.string()).code, 0);
  EXPECT_EQ(run("-q score " + run_dir.string() + " --kendall-p 2").code, 1);
}

TEST(Cli, PartialFailureExitsTwo) {
  TempDir dir;
  write_toy(dir / "toy.csv");
  write_text(dir / "c.json", R"({"output_dir": "run", "seed": 2,
    "datasets": [{"id": "toy", "path": "toy.csv", "task": "regression", "target": "y"}],
    "methods": [{"id": "ridge", "builtin": "ridge"},
                {"id": "broken", "command": [")" STABX_FIXTURES_DIR R"(/exit_runner.sh"], "task": "feature_importance"}],
    "perturbation": {"repeats": 2}})");
  EXPECT_EQ(run("-q pipeline " + (dir / "c.json").string()).code, 2);
}

TEST(Cli, ValidateRunner) {
  TempDir dir;
  write_toy(dir / "toy.csv");
  const auto ok = run("validate-runner --data " + (dir / "toy.csv").string() + " --target y -- " STABX_BUILTIN_RUNNER);
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("feature_importance: ok"), std::string::npos);
  EXPECT_NE(ok.out.find("clustering: ok"), std::string::npos);
  EXPECT_NE(ok.out.find("dimension_reduction: ok"), std::string::npos);

  const auto bad = run("validate-runner --data " + (dir / "toy.csv").string() +
                       " --tasks clustering -- " STABX_FIXTURES_DIR "/exit_runner.sh");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("clustering: crash"), std::string::npos);
  EXPECT_EQ(run("validate-runner --data " + (dir / "toy.csv").string() + " -- /nonexistent/runner").code, 1);
}

TEST(BuiltinRunner, RejectsUnknownManifestVersion) {
  TempDir dir;
  write_toy(dir / "toy.csv");
  write_text(dir / "m.json", R"({"version": 99, "task": "clustering", "train_path": ")" + (dir / "toy.csv").string() +
                                 R"(", "k_clusters": 2, "output_paths": {"interpretation": ")" +
                                 (dir / "out.csv").string() + R"("}})");
  const int status = std::system((std::string(STABX_BUILTIN_RUNNER) + " " + (dir / "m.json").string() + " 2>/dev/null").c_str());
  EXPECT_NE(WEXITSTATUS(status), 0);
  EXPECT_FALSE(std::filesystem::exists(dir / "out.csv"));
}
