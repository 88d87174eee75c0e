#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabx/core/types.hpp"

namespace stabx::runner {

inline constexpr int kManifestVersion = 1;
// Twelve hours.
inline constexpr std::int64_t kDefaultTimeoutSeconds = 43200;

struct OutputPaths {
  std::filesystem::path interpretation;
  std::optional<std::filesystem::path> predictions;
};

// The JSON document handed to an external method process.
struct RunnerManifest {
  InterpretationKind task = InterpretationKind::feature_importance;
  std::filesystem::path train_path;
  std::optional<std::filesystem::path> test_path;
  std::optional<std::string> target_column;
  TaskKind task_kind = TaskKind::unsupervised;
  // Class alphabet for classification targets, in code order.
  std::vector<std::string> class_labels;
  std::optional<int> k_clusters;
  std::optional<std::size_t> rank;
  std::uint64_t seed = 0;
  OutputPaths output_paths;
  std::int64_t timeout_seconds = kDefaultTimeoutSeconds;
  // Method-specific settings, passed through untouched.
  nlohmann::json params = nlohmann::json::object();

  // Paths absolute; clustering needs k_clusters >= 1, dimension reduction a
  // rank >= 1, feature importance a target; predictions need a test set.
  void validate() const;

  nlohmann::json to_json() const;
  // Rejects documents whose "version" is not kManifestVersion.
  static RunnerManifest from_json(const nlohmann::json& doc);

  void write(const std::filesystem::path& path) const;
  static RunnerManifest read(const std::filesystem::path& path);
};

}  // namespace stabx::runner
