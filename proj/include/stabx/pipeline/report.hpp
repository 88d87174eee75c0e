#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stabx/stability/table.hpp"

namespace stabx::pipeline {

// Competition ranks by descending value: (0.9, 0.5, 0.5) -> (1, 2, 2).
// Missing values get no rank.
std::vector<std::optional<std::size_t>> competition_ranks(const std::vector<std::optional<double>>& values);

struct DatasetShape {
  std::string id;
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
};

// Ascending N/P, ties by id.
std::vector<std::string> order_datasets(std::vector<DatasetShape> shapes);

struct BumpAverage {
  std::string method;
  std::optional<double> mean;
  // Datasets contributing to the mean.
  std::size_t n_datasets = 0;
};

struct BumpRanking {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  // ranks[d][m]
  std::vector<std::vector<std::optional<std::size_t>>> ranks;
  // Methods by descending mean stability over the datasets where present;
  // ties by method id, methods with no value last.
  std::vector<BumpAverage> average;
};

// `dataset_order` selects and orders the table's datasets.
BumpRanking bump_ranking(const stability::StabilityTable& table,
                         const std::vector<std::string>& dataset_order);

// Builds <run>/report from scores.json: heatmap tables, bump rankings, line
// sweeps, accuracy-stability scatter with association fits, and index.json.
// Output depends only on the scores file.
void write_report(const std::filesystem::path& run_dir,
                  const std::optional<std::filesystem::path>& scores_dir = std::nullopt);

}  // namespace stabx::pipeline
