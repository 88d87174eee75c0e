#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stabx/core/dataset.hpp"
#include "stabx/core/types.hpp"

namespace stabx::pipeline {

// Built-in interpreters by name:
//   feature_importance: ridge, lasso, permutation
//   clustering: kmeans, kmeanspp, minibatch_kmeans, hierarchical, spectral
//   dimension_reduction: pca, random_projection, mds, isomap, spectral_embedding
std::vector<std::string> builtin_names();
std::optional<InterpretationKind> builtin_kind(std::string_view name);

// Problems with `params` for the named built-in (unknown keys, bad values).
std::vector<std::string> check_builtin_params(std::string_view name, const nlohmann::json& params);

struct BuiltinInput {
  const TabularDataset* train = nullptr;
  // Held-out rows for supervised methods; predictions are made on it.
  const TabularDataset* test = nullptr;
  std::optional<int> k_clusters;
  std::optional<std::size_t> rank;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();
};

struct BuiltinOutput {
  Interpretation interpretation;
  std::optional<PredictionSet> predictions;
};

BuiltinOutput run_builtin(std::string_view name, const BuiltinInput& input);

}  // namespace stabx::pipeline
