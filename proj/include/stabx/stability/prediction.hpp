#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/types.hpp"
#include "stabx/metrics/partition.hpp"

namespace stabx::stability {

// exp(-entropy) of the empirical label distribution, entropy in nats.
double label_agreement_score(std::span<const double> labels);
// exp(-sd) with the sample standard deviation (ddof = 1).
double spread_score(std::span<const double> values);

struct PredictionStability {
  std::optional<double> mean;
  std::vector<SampleId> sample_ids;
  std::vector<double> per_sample;
  // Samples predicted in fewer than 2 repeats.
  std::size_t excluded = 0;
};

// Per-sample consistency of one method's test predictions across repeats.
// Label predictions use label_agreement_score, real ones spread_score.
// Samples are reported in order of first appearance.
PredictionStability prediction_stability(const std::vector<PredictionSet>& repeats);

// Mean over repeats of the fraction of equal predicted labels. Repeats must
// cover identical sample id sequences.
std::optional<double> between_prediction_classification(
    const std::vector<std::optional<PredictionSet>>& a,
    const std::vector<std::optional<PredictionSet>>& b);

enum class MseScope {
  // Min-max over the distinct method pairs of one repeat, then averaged.
  per_repeat,
  // Min-max over the repeats of one pair, then averaged.
  per_pair,
};

struct RegressionAgreement {
  // M x M; NaN where a pair has no repeat in common; diagonal 1.
  Eigen::MatrixXd scores;
  // True when some normalization had max == min and defined every value as 0.
  bool degenerate = false;
};

// 1 - mean min-max-normalized MSE between the regression predictions of
// every pair of methods. preds[m][r] is method m in repeat r.
RegressionAgreement between_prediction_regression(
    const std::vector<std::vector<std::optional<PredictionSet>>>& preds,
    MseScope scope = MseScope::per_repeat);

double accuracy_classification(const PredictionSet& preds);
// exp(-MSE).
double accuracy_regression(const PredictionSet& preds);
double accuracy_clustering(const ClusterLabeling& labels, const ClusterLabeling& truth,
                           metrics::PartitionMetric metric = metrics::PartitionMetric::ari);

}  // namespace stabx::stability
