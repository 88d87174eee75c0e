#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "stabx/pipeline/config.hpp"

namespace stabx::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

// Run directory layout:
//   run.json                                   provenance and metric settings
//   datasets/<dataset>.json, .samples.csv      shape, task and truth labels
//   plans/<dataset>/<plan>.json                perturbation plans
//   artifacts/<dataset>/<method>/<plan>/<r>.csv       interpretation
//   artifacts/<dataset>/<method>/<plan>/<r>.pred.csv  test predictions
//   artifacts/<dataset>/<method>/<plan>/<r>.json      status, seed, skip key
//   work/...                                   runner inputs and logs
//   scores/, report/
namespace layout {
std::filesystem::path run_info(const std::filesystem::path& run);
std::filesystem::path dataset_info(const std::filesystem::path& run, const std::string& dataset);
std::filesystem::path dataset_samples(const std::filesystem::path& run, const std::string& dataset);
std::filesystem::path plan_file(const std::filesystem::path& run, const std::string& dataset,
                                const std::string& plan);
std::filesystem::path artifact_dir(const std::filesystem::path& run, const std::string& dataset,
                                   const std::string& method, const std::string& plan);
std::filesystem::path work_dir(const std::filesystem::path& run, const std::string& dataset,
                               const std::string& method, const std::string& plan);
}  // namespace layout

// Plan directory names: "split", "subsample" and "noise_<sigma>".
std::string noise_plan_name(double sigma);

// Variant id of a dimension reduction method at one rank, e.g. "pca@r5",
// and its inverse.
std::string rank_variant(const std::string& method, std::size_t rank);
std::optional<std::pair<std::string, std::size_t>> split_rank_variant(std::string_view variant);

struct PipelineOptions {
  std::optional<std::size_t> workers;
  std::optional<std::filesystem::path> output_dir;
};

struct PipelineSummary {
  std::filesystem::path run_dir;
  std::size_t units = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

// perturb -> interpret -> score -> report. Completed units whose skip key
// matches are not recomputed. Throws ConfigError before any work when the
// config references something that does not exist.
PipelineSummary run_pipeline(const PipelineConfig& config, const PipelineOptions& options = {});

}  // namespace stabx::pipeline
