#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stabx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitFatal = 3;

struct PipelineArgs {
  std::string config;
  std::optional<std::size_t> workers;
  std::optional<std::string> output;
};

struct PerturbArgs {
  std::optional<std::string> data;
  std::optional<std::size_t> n_samples;
  std::string kind = "split";
  double ratio = 0.7;
  std::size_t repeats = 100;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  std::string distribution = "normal";
  std::optional<std::string> out;
};

struct ScoreArgs {
  std::string run_dir;
  std::optional<std::string> rank_metric;
  std::optional<std::size_t> k;
  std::optional<double> kendall_p;
  std::optional<std::string> partition_metric;
  std::optional<std::size_t> nn_grid;
  std::optional<std::size_t> nn_sample_cap;
  std::optional<std::string> out;
  bool report = false;
};

struct ValidateArgs {
  std::vector<std::string> command;
  std::string data;
  std::optional<std::string> target;
  std::string task_kind = "regression";
  std::vector<std::string> tasks;
  int k_clusters = 3;
  std::size_t rank = 2;
  std::uint64_t seed = 0;
  std::int64_t timeout_seconds = 60;
  std::string params = "{}";
  std::optional<std::string> work_dir;
};

int cmd_pipeline(const PipelineArgs& args);
int cmd_perturb(const PerturbArgs& args);
int cmd_score(const ScoreArgs& args);
int cmd_report(const std::string& run_dir);
int cmd_validate(const ValidateArgs& args);

}  // namespace stabx::cli
