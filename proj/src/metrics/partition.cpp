#include "stabx/metrics/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "stabx/core/errors.hpp"

namespace stabx::metrics {
namespace {

double pairs(long long n) { return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0; }

double entropy(const std::vector<long long>& sums, long long total) {
  double h = 0.0;
  const double n = static_cast<double>(total);
  for (long long s : sums) {
    if (s > 0) {
      const double q = static_cast<double>(s) / n;
      h -= q * std::log(q);
    }
  }
  return h;
}

}  // namespace

std::string_view to_string(PartitionMetric metric) {
  switch (metric) {
    case PartitionMetric::ari:
      return "ari";
    case PartitionMetric::fm:
      return "fm";
    case PartitionMetric::mi:
      return "mi";
    case PartitionMetric::v_measure:
      return "v_measure";
  }
  return "unknown";
}

PartitionMetric parse_partition_metric(std::string_view text) {
  if (text == "ari") return PartitionMetric::ari;
  if (text == "fm") return PartitionMetric::fm;
  if (text == "mi") return PartitionMetric::mi;
  if (text == "v_measure" || text == "v") return PartitionMetric::v_measure;
  throw ValidationError("unknown partition metric '" + std::string(text) + "'");
}

ContingencyTable contingency(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ValidationError("labelings differ in length");
  std::unordered_map<int, std::size_t> row_of, col_of;
  std::vector<std::size_t> ri(a.size()), ci(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ri[i] = row_of.try_emplace(a[i], row_of.size()).first->second;
    ci[i] = col_of.try_emplace(b[i], col_of.size()).first->second;
  }
  ContingencyTable t;
  t.counts.assign(row_of.size(), std::vector<long long>(col_of.size(), 0));
  t.row_sums.assign(row_of.size(), 0);
  t.col_sums.assign(col_of.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++t.counts[ri[i]][ci[i]];
    ++t.row_sums[ri[i]];
    ++t.col_sums[ci[i]];
  }
  t.total = static_cast<long long>(a.size());
  return t;
}

ContingencyTable contingency(const ClusterLabeling& a, const ClusterLabeling& b) {
  if (a.sample_ids != b.sample_ids) {
    throw ValidationError("labelings cover different sample id sequences");
  }
  return contingency(a.labels, b.labels);
}

double ari(const ContingencyTable& t) {
  if (t.total < 2) throw ValidationError("ARI needs at least 2 samples");
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& row : t.counts) {
    for (long long c : row) index += pairs(c);
  }
  for (long long s : t.row_sums) sa += pairs(s);
  for (long long s : t.col_sums) sb += pairs(s);
  const double expected = sa * sb / pairs(t.total);
  const double denom = 0.5 * (sa + sb) - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double fowlkes_mallows(const ContingencyTable& t) {
  double tp = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& row : t.counts) {
    for (long long c : row) tp += pairs(c);
  }
  for (long long s : t.row_sums) sa += pairs(s);
  for (long long s : t.col_sums) sb += pairs(s);
  if (sa == 0.0 && sb == 0.0) return 1.0;
  if (sa == 0.0 || sb == 0.0) return 0.0;
  return tp / std::sqrt(sa * sb);
}

double mutual_information(const ContingencyTable& t) {
  const double n = static_cast<double>(t.total);
  double mi = 0.0;
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    for (std::size_t j = 0; j < t.counts[i].size(); ++j) {
      const long long c = t.counts[i][j];
      if (c == 0) continue;
      const double pij = static_cast<double>(c) / n;
      mi += pij * std::log(static_cast<double>(c) * n /
                           (static_cast<double>(t.row_sums[i]) * static_cast<double>(t.col_sums[j])));
    }
  }
  return std::max(mi, 0.0);
}

double entropy_rows(const ContingencyTable& t) { return entropy(t.row_sums, t.total); }
double entropy_cols(const ContingencyTable& t) { return entropy(t.col_sums, t.total); }

double v_measure(const ContingencyTable& t, double beta) {
  if (!(beta > 0.0)) throw ValidationError("v-measure beta must be positive");
  const double mi = mutual_information(t);
  const double ha = entropy_rows(t);
  const double hb = entropy_cols(t);
  const double h = ha == 0.0 ? 1.0 : std::min(1.0, mi / ha);
  const double c = hb == 0.0 ? 1.0 : std::min(1.0, mi / hb);
  const double denom = beta * c + h;
  return denom == 0.0 ? 0.0 : (1.0 + beta) * h * c / denom;
}

double partition_similarity(PartitionMetric metric, const ContingencyTable& t) {
  switch (metric) {
    case PartitionMetric::ari:
      return ari(t);
    case PartitionMetric::fm:
      return fowlkes_mallows(t);
    case PartitionMetric::mi:
      return mutual_information(t);
    case PartitionMetric::v_measure:
      return v_measure(t);
  }
  return 0.0;
}

double partition_similarity(PartitionMetric metric, std::span<const int> a,
                            std::span<const int> b) {
  return partition_similarity(metric, contingency(a, b));
}

double partition_similarity(PartitionMetric metric, const ClusterLabeling& a,
                            const ClusterLabeling& b) {
  return partition_similarity(metric, contingency(a, b));
}

}  // namespace stabx::metrics
