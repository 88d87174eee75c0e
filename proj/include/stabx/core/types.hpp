#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace stabx {

using SampleId = std::string;

enum class TaskKind { regression, classification, unsupervised };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view text);

// Features ranked by descending importance. Equal scores are ordered by
// ascending feature index so that rankings are reproducible.
class FeatureRanking {
 public:
  static FeatureRanking from_scores(std::vector<double> scores);

  // Validates that `order` is a permutation consistent with `scores`.
  FeatureRanking(std::vector<std::size_t> order, std::vector<double> scores);

  const std::vector<std::size_t>& order() const { return order_; }
  const std::vector<double>& scores() const { return scores_; }
  std::size_t size() const { return order_.size(); }

  friend bool operator==(const FeatureRanking&, const FeatureRanking&) =
      default;

 private:
  std::vector<std::size_t> order_;
  std::vector<double> scores_;
};

// Ranking order implied by scores under the ascending-index tie-break.
std::vector<std::size_t> rank_order(std::span<const double> scores);

struct ClusterLabeling {
  std::vector<SampleId> sample_ids;
  std::vector<int> labels;
  int k = 1;

  // Throws ValidationError when labels fall outside [0, k) or lengths differ.
  void validate() const;
  friend bool operator==(const ClusterLabeling&,
                         const ClusterLabeling&) = default;
};

struct Embedding {
  std::vector<SampleId> sample_ids;
  Eigen::MatrixXd coords;
  // Non-fatal conditions raised by the producing learner, e.g. zero-padded
  // coordinates or a degenerate spectrum.
  std::vector<std::string> flags;

  std::size_t rank() const { return static_cast<std::size_t>(coords.cols()); }
  void validate() const;
};

struct PredictionSet {
  std::vector<SampleId> sample_ids;
  Eigen::VectorXd values;
  Eigen::VectorXd truth;
  bool classification = false;

  void validate() const;
};

using Interpretation = std::variant<FeatureRanking, ClusterLabeling, Embedding>;

enum class InterpretationKind { feature_importance, clustering, dimension_reduction };

std::string_view to_string(InterpretationKind kind);
InterpretationKind parse_interpretation_kind(std::string_view text);
InterpretationKind kind_of(const Interpretation& value);

struct InterpretationArtifact {
  std::string method_id;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::string plan_hash;
  Interpretation value;
};

}  // namespace stabx
