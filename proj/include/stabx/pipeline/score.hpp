#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabx/core/types.hpp"
#include "stabx/pipeline/config.hpp"

namespace stabx::pipeline {

nlohmann::json metrics_to_json(const MetricConfig& metrics);
MetricConfig metrics_from_json(const nlohmann::json& doc);

// Reads an artifact file written by the pipeline or by any tool following
// the output schemas; dimensions are taken from the file itself.
Interpretation load_artifact(const std::filesystem::path& path);

struct ScoreOptions {
  // Defaults to the settings recorded in run.json, else MetricConfig{}.
  std::optional<MetricConfig> metrics;
  // Defaults to <run>/scores.
  std::optional<std::filesystem::path> out_dir;
};

// Recomputes every aggregate from the artifacts under <run>/artifacts and
// writes scores.json plus within_<kind>.csv and accuracy_<kind>.csv tables.
// Accepts artifacts/<dataset>/<method>/<plan>/<r>.csv and the flat
// artifacts/<dataset>/<method>/<r>.csv layout. Throws ValidationError when
// there are no artifacts or one cell mixes interpretation kinds.
nlohmann::json score_run(const std::filesystem::path& run_dir, const ScoreOptions& options = {});

}  // namespace stabx::pipeline
