#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "stabx/core/types.hpp"

namespace stabx::metrics {

enum class PartitionMetric { ari, fm, mi, v_measure };

std::string_view to_string(PartitionMetric metric);
PartitionMetric parse_partition_metric(std::string_view text);

// Co-membership counts. Rows follow the distinct labels of A and columns
// those of B, each in order of first appearance.
struct ContingencyTable {
  std::vector<std::vector<long long>> counts;
  std::vector<long long> row_sums;
  std::vector<long long> col_sums;
  long long total = 0;
};

ContingencyTable contingency(std::span<const int> a, std::span<const int> b);
// Requires identical sample id sequences.
ContingencyTable contingency(const ClusterLabeling& a, const ClusterLabeling& b);

// Adjusted Rand index; 1 when the chance-corrected denominator vanishes.
double ari(const ContingencyTable& t);
// TP / sqrt(pairs_A * pairs_B); 1 when both pair counts are 0, 0 when one is.
double fowlkes_mallows(const ContingencyTable& t);
// Mutual information in nats.
double mutual_information(const ContingencyTable& t);
double entropy_rows(const ContingencyTable& t);
double entropy_cols(const ContingencyTable& t);
// (1 + beta) h c / (beta c + h) with h = 1 - H(A|B)/H(A), c = 1 - H(B|A)/H(B);
// a zero entropy makes the corresponding term 1.
double v_measure(const ContingencyTable& t, double beta = 1.0);

double partition_similarity(PartitionMetric metric, const ContingencyTable& t);
double partition_similarity(PartitionMetric metric, std::span<const int> a,
                            std::span<const int> b);
double partition_similarity(PartitionMetric metric, const ClusterLabeling& a,
                            const ClusterLabeling& b);

}  // namespace stabx::metrics
