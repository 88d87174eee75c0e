#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/errors.hpp"
#include "stabx/core/types.hpp"

namespace stabx::runner {

// A runner output file violates its schema or a domain invariant.
class InvalidOutputError : public Error {
 public:
  using Error::Error;
};

// What a valid output must look like.
struct ExpectedDims {
  // Feature importance: number of features.
  std::size_t n_features = 0;
  // Clustering and embeddings: every id exactly once; output rows are
  // reordered to this sequence.
  std::vector<SampleId> sample_ids;
  std::optional<int> k_clusters;
  std::optional<std::size_t> rank;
};

// Schemas: feature_importance `feature_index,score`; clustering
// `sample_id,label`; dimension_reduction `sample_id,c1,...,cr`.
// Throws InvalidOutputError.
Interpretation parse_interpretation(const std::filesystem::path& path, InterpretationKind task,
                                    const ExpectedDims& dims);

// Kind implied by a file's header, if it matches one of the schemas.
std::optional<InterpretationKind> sniff_interpretation(const std::filesystem::path& path);

// Canonical output: rankings by feature index, labelings and embeddings in
// sample order, numbers in shortest round-trip form.
void write_interpretation(const Interpretation& value, const std::filesystem::path& path);

struct PredictionExpectation {
  std::vector<SampleId> sample_ids;
  Eigen::VectorXd truth;
  bool classification = false;
  // Classification predictions must be one of these labels.
  std::vector<std::string> class_labels;
};

// `sample_id,prediction` covering every expected test id exactly once; an
// optional third `truth` column is ignored.
PredictionSet parse_predictions(const std::filesystem::path& path,
                                const PredictionExpectation& expected);

// Writes `sample_id,prediction[,truth]`; class codes are written as labels
// when `class_labels` is given.
void write_predictions(const PredictionSet& preds, const std::filesystem::path& path,
                       const std::vector<std::string>& class_labels = {},
                       bool with_truth = false);

}  // namespace stabx::runner
