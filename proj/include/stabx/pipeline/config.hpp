#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabx/core/errors.hpp"
#include "stabx/core/types.hpp"
#include "stabx/perturb/plan.hpp"
#include "stabx/stability/aggregate.hpp"

namespace stabx::pipeline {

// Every problem found in a config, reported together.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct DatasetConfig {
  std::string id;
  std::filesystem::path path;
  TaskKind task = TaskKind::unsupervised;
  // Supervised target column.
  std::optional<std::string> target;
  // Ground-truth label column of an unsupervised dataset.
  std::optional<std::string> truth;
  // Oracle cluster count; defaults to the number of truth labels.
  std::optional<int> clusters;
  std::string id_column = "id";
};

struct MethodConfig {
  std::string id;
  std::optional<std::string> builtin;
  // External runner argv; the manifest path is appended.
  std::vector<std::string> command;
  InterpretationKind kind = InterpretationKind::feature_importance;
  nlohmann::json params = nlohmann::json::object();
  // Restricts the method to these datasets; empty means all applicable.
  std::vector<std::string> datasets;
};

struct NoiseConfig {
  perturb::NoiseDistribution distribution = perturb::NoiseDistribution::normal;
  std::vector<double> sigmas;
  std::size_t repeats = 10;
};

struct PerturbationConfig {
  double split_ratio = 0.7;
  double subsample_fraction = 0.7;
  std::size_t repeats = 100;
  std::optional<NoiseConfig> noise;
};

struct MetricConfig {
  stability::MetricSpec spec;
  std::size_t k_sweep_min = 1;
  std::size_t k_sweep_max = 30;
  std::vector<std::size_t> dr_ranks{2, 5, 10};
};

struct PipelineConfig {
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool standardize = true;
  std::int64_t timeout_seconds = 43200;
  std::vector<DatasetConfig> datasets;
  std::vector<MethodConfig> methods;
  PerturbationConfig perturbation;
  MetricConfig metrics;
  // Hash of the document without output_dir and workers, which do not
  // affect results.
  std::string hash;

  // Relative paths resolve against `base_dir`. Throws ConfigError listing
  // every schema problem.
  static PipelineConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);

  // Checks references to the outside world: dataset files and columns,
  // runner executables, method applicability. Throws ConfigError.
  void check_resources() const;

  bool applies(const MethodConfig& method, const DatasetConfig& dataset) const;
};

}  // namespace stabx::pipeline
