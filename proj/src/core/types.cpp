#include "stabx/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stabx/core/errors.hpp"

namespace stabx {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::regression:
      return "regression";
    case TaskKind::classification:
      return "classification";
    case TaskKind::unsupervised:
      return "unsupervised";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "regression") return TaskKind::regression;
  if (text == "classification") return TaskKind::classification;
  if (text == "unsupervised") return TaskKind::unsupervised;
  throw ValidationError("unknown task kind '" + std::string(text) + "'");
}

std::string_view to_string(InterpretationKind kind) {
  switch (kind) {
    case InterpretationKind::feature_importance:
      return "feature_importance";
    case InterpretationKind::clustering:
      return "clustering";
    case InterpretationKind::dimension_reduction:
      return "dimension_reduction";
  }
  return "unknown";
}

InterpretationKind parse_interpretation_kind(std::string_view text) {
  if (text == "feature_importance") return InterpretationKind::feature_importance;
  if (text == "clustering") return InterpretationKind::clustering;
  if (text == "dimension_reduction") return InterpretationKind::dimension_reduction;
  throw ValidationError("unknown interpretation task '" + std::string(text) +
                        "'");
}

InterpretationKind kind_of(const Interpretation& value) {
  return static_cast<InterpretationKind>(value.index());
}

std::vector<std::size_t> rank_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

FeatureRanking FeatureRanking::from_scores(std::vector<double> scores) {
  auto order = rank_order(scores);
  return FeatureRanking(std::move(order), std::move(scores));
}

FeatureRanking::FeatureRanking(std::vector<std::size_t> order,
                               std::vector<double> scores)
    : order_(std::move(order)), scores_(std::move(scores)) {
  const std::size_t p = scores_.size();
  if (p == 0) throw ValidationError("feature ranking is empty");
  if (order_.size() != p) {
    throw ValidationError("ranking order and scores differ in length");
  }
  for (double s : scores_) {
    if (!std::isfinite(s)) {
      throw ValidationError("feature importance score is not finite");
    }
  }
  std::vector<bool> seen(p, false);
  for (std::size_t f : order_) {
    if (f >= p || seen[f]) {
      throw ValidationError("ranking order is not a permutation of 0..P-1");
    }
    seen[f] = true;
  }
  if (order_ != rank_order(scores_)) {
    throw ValidationError("ranking order is inconsistent with scores");
  }
}

void ClusterLabeling::validate() const {
  if (k < 1) throw ValidationError("cluster count must be at least 1");
  if (labels.size() != sample_ids.size()) {
    throw ValidationError("labels and sample ids differ in length");
  }
  for (int label : labels) {
    if (label < 0 || label >= k) {
      throw ValidationError("label " + std::to_string(label) +
                            " outside [0, " + std::to_string(k) + ")");
    }
  }
}

void Embedding::validate() const {
  if (coords.cols() < 1) throw ValidationError("embedding rank must be >= 1");
  if (static_cast<std::size_t>(coords.rows()) != sample_ids.size()) {
    throw ValidationError("embedding rows and sample ids differ in length");
  }
  if (!coords.allFinite()) {
    throw ValidationError("embedding coordinates are not finite");
  }
}

void PredictionSet::validate() const {
  const auto n = static_cast<Eigen::Index>(sample_ids.size());
  if (values.size() != n || truth.size() != n) {
    throw ValidationError("prediction, truth and sample ids differ in length");
  }
}

}  // namespace stabx
