#include "stabx/stability/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "stabx/core/errors.hpp"
#include "stabx/stability/aggregate.hpp"

namespace stabx::stability {
namespace {

void check_aligned(const PredictionSet& a, const PredictionSet& b) {
  if (a.sample_ids != b.sample_ids) {
    throw ValidationError("prediction sets cover different test samples");
  }
}

double mse(const PredictionSet& a, const PredictionSet& b) {
  check_aligned(a, b);
  if (a.values.size() == 0) throw ValidationError("empty prediction set");
  return (a.values - b.values).squaredNorm() / static_cast<double>(a.values.size());
}

}  // namespace

double label_agreement_score(std::span<const double> labels) {
  if (labels.empty()) throw ValidationError("no predictions");
  std::map<double, std::size_t> counts;
  for (double v : labels) ++counts[v];
  double h = 0.0;
  const double n = static_cast<double>(labels.size());
  for (const auto& [label, c] : counts) {
    const double q = static_cast<double>(c) / n;
    h -= q * std::log(q);
  }
  return std::exp(-h);
}

double spread_score(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("standard deviation needs at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::exp(-std::sqrt(ss / static_cast<double>(values.size() - 1)));
}

PredictionStability prediction_stability(const std::vector<PredictionSet>& repeats) {
  PredictionStability out;
  if (repeats.empty()) return out;
  const bool classification = repeats.front().classification;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<SampleId> order;
  std::vector<std::vector<double>> values;
  for (const auto& set : repeats) {
    if (set.classification != classification) {
      throw ValidationError("prediction repeats mix classification and regression");
    }
    for (std::size_t i = 0; i < set.sample_ids.size(); ++i) {
      auto [it, inserted] = slot.try_emplace(set.sample_ids[i], order.size());
      if (inserted) {
        order.push_back(set.sample_ids[i]);
        values.emplace_back();
      }
      values[it->second].push_back(set.values(static_cast<Eigen::Index>(i)));
    }
  }
  for (std::size_t s = 0; s < order.size(); ++s) {
    if (values[s].size() < 2) {
      ++out.excluded;
      continue;
    }
    out.sample_ids.push_back(order[s]);
    out.per_sample.push_back(classification ? label_agreement_score(values[s])
                                            : spread_score(values[s]));
  }
  if (out.excluded > 0) {
    spdlog::info("prediction stability: {} sample(s) predicted fewer than twice, excluded",
                 out.excluded);
  }
  if (!out.per_sample.empty()) out.mean = ordered_mean(out.per_sample);
  return out;
}

std::optional<double> between_prediction_classification(
    const std::vector<std::optional<PredictionSet>>& a,
    const std::vector<std::optional<PredictionSet>>& b) {
  if (a.size() != b.size()) throw ValidationError("methods ran different numbers of repeats");
  std::vector<double> per_repeat;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (!a[r] || !b[r]) continue;
    check_aligned(*a[r], *b[r]);
    if (a[r]->values.size() == 0) continue;
    per_repeat.push_back((a[r]->values.array() == b[r]->values.array()).cast<double>().mean());
  }
  if (per_repeat.empty()) return std::nullopt;
  return ordered_mean(std::move(per_repeat));
}

RegressionAgreement between_prediction_regression(
    const std::vector<std::vector<std::optional<PredictionSet>>>& preds, MseScope scope) {
  const std::size_t m = preds.size();
  std::size_t repeats = 0;
  for (const auto& p : preds) repeats = std::max(repeats, p.size());
  auto at = [&](std::size_t method, std::size_t r) -> const PredictionSet* {
    return r < preds[method].size() && preds[method][r] ? &*preds[method][r] : nullptr;
  };

  RegressionAgreement out;
  const auto mm = static_cast<Eigen::Index>(m);
  out.scores = Eigen::MatrixXd::Constant(mm, mm, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 0; i < mm; ++i) out.scores(i, i) = 1.0;

  // normalized[i][j] collects the normalized MSE of pair (i, j) per repeat.
  std::vector<std::vector<std::vector<double>>> normalized(m, std::vector<std::vector<double>>(m));
  auto normalize = [&out](std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, b = *hi;
    if (b == a) {
      out.degenerate = true;
      std::fill(v.begin(), v.end(), 0.0);
      return;
    }
    for (double& x : v) x = (x - a) / (b - a);
  };

  if (scope == MseScope::per_repeat) {
    for (std::size_t r = 0; r < repeats; ++r) {
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      std::vector<double> values;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          if (!at(i, r) || !at(j, r)) continue;
          pairs.emplace_back(i, j);
          values.push_back(mse(*at(i, r), *at(j, r)));
        }
      }
      if (values.empty()) continue;
      normalize(values);
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        normalized[pairs[q].first][pairs[q].second].push_back(values[q]);
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        std::vector<double> values;
        for (std::size_t r = 0; r < repeats; ++r) {
          if (at(i, r) && at(j, r)) values.push_back(mse(*at(i, r), *at(j, r)));
        }
        if (values.empty()) continue;
        normalize(values);
        normalized[i][j] = std::move(values);
      }
    }
  }
  if (out.degenerate) {
    spdlog::warn("regression prediction agreement: equal MSEs in a normalization group, "
                 "normalized values set to 0");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (normalized[i][j].empty()) continue;
      const double s = 1.0 - ordered_mean(normalized[i][j]);
      out.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
      out.scores(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
    }
  }
  return out;
}

double accuracy_classification(const PredictionSet& preds) {
  preds.validate();
  if (preds.values.size() == 0) throw ValidationError("empty prediction set");
  return (preds.values.array() == preds.truth.array()).cast<double>().mean();
}

double accuracy_regression(const PredictionSet& preds) {
  preds.validate();
  if (preds.values.size() == 0) throw ValidationError("empty prediction set");
  return std::exp(-(preds.values - preds.truth).squaredNorm() /
                  static_cast<double>(preds.values.size()));
}

double accuracy_clustering(const ClusterLabeling& labels, const ClusterLabeling& truth,
                           metrics::PartitionMetric metric) {
  const auto [a, b] = align_on_common(labels, truth);
  return metrics::partition_similarity(metric, std::get<ClusterLabeling>(a),
                                       std::get<ClusterLabeling>(b));
}

}  // namespace stabx::stability
