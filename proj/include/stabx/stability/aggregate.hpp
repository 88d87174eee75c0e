#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabx/core/types.hpp"
#include "stabx/metrics/partition.hpp"
#include "stabx/metrics/rank.hpp"

namespace stabx::stability {

struct MetricSpec {
  metrics::RankMetric rank = metrics::RankMetric::ao;
  std::size_t k = 10;
  double kendall_p = 0.0;
  metrics::PartitionMetric partition = metrics::PartitionMetric::ari;
  std::size_t nn_grid = 50;
  std::size_t nn_sample_cap = 500;
  std::uint64_t nn_seed = 0;
};

// Name of the metric applied to a kind, e.g. "ao@10", "ari", "nn_auc".
std::string metric_name(InterpretationKind kind, const MetricSpec& spec);

// Restricts two labelings or embeddings to their common sample ids, in the
// order of `a`. Rankings are returned unchanged.
std::pair<Interpretation, Interpretation> align_on_common(const Interpretation& a,
                                                          const Interpretation& b);
std::size_t common_samples(const Interpretation& a, const Interpretation& b);

// Similarity of two interpretations of the same kind, compared on their
// common samples. Returns nullopt when fewer than 2 samples are shared.
std::optional<double> pair_score(const Interpretation& a, const Interpretation& b,
                                 const MetricSpec& spec);

struct PairwiseSummary {
  // Absent when the cell is missing.
  std::optional<double> mean;
  std::size_t repeats_total = 0;
  std::size_t repeats_ok = 0;
  std::size_t pairs = 0;
  std::size_t skipped_pairs = 0;
  std::string note;
};

// Share of failed repeats above which a cell is reported missing.
inline constexpr double kMaxFailureFraction = 0.5;

// Mean metric over all unordered pairs of successful repeats. `repeats[r]` is
// empty when repeat r failed.
PairwiseSummary within_method(const std::vector<std::optional<InterpretationArtifact>>& repeats,
                              const MetricSpec& spec);

// Mean over repeats of metric(A_r, B_r), over repeats where both succeeded.
// Throws ValidationError when aligned repeats come from different plans.
PairwiseSummary between_method(const std::vector<std::optional<InterpretationArtifact>>& a,
                               const std::vector<std::optional<InterpretationArtifact>>& b,
                               const MetricSpec& spec);

// Arithmetic mean of `values` after sorting, so the result does not depend
// on input order.
double ordered_mean(std::vector<double> values);

}  // namespace stabx::stability
