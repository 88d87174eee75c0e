#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabx/core/dataset.hpp"
#include "stabx/runner/invoke.hpp"

namespace stabx::runner {

struct ValidateOptions {
  // Tasks to exercise; feature importance needs a dataset with a target.
  std::vector<InterpretationKind> tasks;
  int k_clusters = 3;
  std::size_t rank = 2;
  std::uint64_t seed = 0;
  std::int64_t timeout_seconds = 60;
  double split_ratio = 0.7;
  nlohmann::json params = nlohmann::json::object();
  // Manifests, inputs, outputs and logs go here.
  std::filesystem::path work_dir;
};

struct TaskCheck {
  InterpretationKind task = InterpretationKind::feature_importance;
  RunnerResult result;
};

// Runs `command` once per task on `data` (a single train/test split for
// feature importance) and validates every output like the pipeline does.
std::vector<TaskCheck> validate_runner(const std::vector<std::string>& command, const TabularDataset& data,
                                       const std::string& target_name, const ValidateOptions& options);

}  // namespace stabx::runner
