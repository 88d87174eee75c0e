#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/types.hpp"

namespace stabx {

// N x P feature matrix with sample ids, feature names and an optional target.
// Immutable once constructed; the "with_*" and "subset" members return new
// datasets.
class TabularDataset {
 public:
  // Validates the invariants: unique ids and names, finite features,
  // aligned target, class targets in [0, C) with C = class_names.size().
  TabularDataset(std::vector<SampleId> sample_ids, Eigen::MatrixXd features,
                 std::vector<std::string> feature_names,
                 std::optional<Eigen::VectorXd> target, TaskKind task_kind,
                 std::vector<std::string> class_names = {});

  std::size_t n_samples() const { return sample_ids_.size(); }
  std::size_t n_features() const { return feature_names_.size(); }
  const std::vector<SampleId>& sample_ids() const { return sample_ids_; }
  const Eigen::MatrixXd& features() const { return features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::optional<Eigen::VectorXd>& target() const { return target_; }
  TaskKind task_kind() const { return task_kind_; }
  // Interned class labels; label c in `target` is class_names()[c].
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t num_classes() const { return class_names_.size(); }
  // Columns found constant by standardize().
  const std::vector<std::size_t>& constant_columns() const {
    return constant_columns_;
  }

  TabularDataset subset(std::span<const std::size_t> rows) const;
  TabularDataset with_features(Eigen::MatrixXd features) const;

 private:
  friend TabularDataset standardize(const TabularDataset& dataset);

  std::vector<SampleId> sample_ids_;
  Eigen::MatrixXd features_;
  std::vector<std::string> feature_names_;
  std::optional<Eigen::VectorXd> target_;
  TaskKind task_kind_;
  std::vector<std::string> class_names_;
  std::vector<std::size_t> constant_columns_;
};

struct LoadOptions {
  // Target column; removed from the features.
  std::optional<std::string> target;
  TaskKind task_kind = TaskKind::unsupervised;
  // A column with this name, if present, supplies the sample ids.
  std::string id_column = "id";
  // Fixed class alphabet in code order. When empty, class labels are
  // interned in first-appearance order.
  std::vector<std::string> class_names;
};

// For unsupervised datasets a target column is read as ground-truth labels and
// interned like a classification target.
TabularDataset load_csv(const std::filesystem::path& path,
                        const LoadOptions& options);

// Writes id column, features and target (class names for categorical
// targets) with round-trip exact number formatting.
void write_csv(const TabularDataset& dataset, const std::filesystem::path& path,
               const std::string& target_name = "target");

// Per-column centering and scaling by the sample standard deviation
// (ddof = 1). Constant columns become all-zero and are recorded in
// constant_columns().
TabularDataset standardize(const TabularDataset& dataset);

// Stable content hash of ids, names, features and target.
std::string content_hash(const TabularDataset& dataset);

}  // namespace stabx
