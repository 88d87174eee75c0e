#include "stabx/stability/aggregate.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "stabx/core/errors.hpp"
#include "stabx/metrics/neighbors.hpp"

namespace stabx::stability {
namespace {

// Row positions in `b` of the ids of `a` that `b` also holds, paired with
// their positions in `a`.
std::vector<std::pair<std::size_t, std::size_t>> common_rows(const std::vector<SampleId>& a,
                                                             const std::vector<SampleId>& b) {
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  if (a == b) {
    rows.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) rows.emplace_back(i, i);
    return rows;
  }
  std::unordered_map<std::string_view, std::size_t> pos;
  pos.reserve(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) pos.emplace(b[j], j);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto it = pos.find(a[i]);
    if (it != pos.end()) rows.emplace_back(i, it->second);
  }
  return rows;
}

const std::vector<SampleId>* ids_of(const Interpretation& v) {
  if (auto* c = std::get_if<ClusterLabeling>(&v)) return &c->sample_ids;
  if (auto* e = std::get_if<Embedding>(&v)) return &e->sample_ids;
  return nullptr;
}

void check_same_kind(const Interpretation& a, const Interpretation& b) {
  if (a.index() != b.index()) {
    throw ValidationError("cannot compare a " + std::string(to_string(kind_of(a))) + " with a " +
                          std::string(to_string(kind_of(b))));
  }
}

std::size_t failed(const std::vector<std::optional<InterpretationArtifact>>& repeats) {
  return static_cast<std::size_t>(
      std::count_if(repeats.begin(), repeats.end(), [](const auto& r) { return !r.has_value(); }));
}

}  // namespace

std::string metric_name(InterpretationKind kind, const MetricSpec& spec) {
  switch (kind) {
    case InterpretationKind::feature_importance:
      return std::string(metrics::to_string(spec.rank)) + "@" + std::to_string(spec.k);
    case InterpretationKind::clustering:
      return std::string(metrics::to_string(spec.partition));
    case InterpretationKind::dimension_reduction:
      return "nn_auc";
  }
  return "unknown";
}

std::size_t common_samples(const Interpretation& a, const Interpretation& b) {
  check_same_kind(a, b);
  const auto* ia = ids_of(a);
  if (!ia) return std::get<FeatureRanking>(a).size();
  return common_rows(*ia, *ids_of(b)).size();
}

std::pair<Interpretation, Interpretation> align_on_common(const Interpretation& a,
                                                          const Interpretation& b) {
  check_same_kind(a, b);
  if (std::holds_alternative<FeatureRanking>(a)) return {a, b};
  const auto rows = common_rows(*ids_of(a), *ids_of(b));
  if (const auto* ca = std::get_if<ClusterLabeling>(&a)) {
    const auto& cb = std::get<ClusterLabeling>(b);
    if (ca->sample_ids == cb.sample_ids) return {a, b};
    ClusterLabeling ra{{}, {}, ca->k}, rb{{}, {}, cb.k};
    for (auto [i, j] : rows) {
      ra.sample_ids.push_back(ca->sample_ids[i]);
      ra.labels.push_back(ca->labels[i]);
      rb.sample_ids.push_back(ca->sample_ids[i]);
      rb.labels.push_back(cb.labels[j]);
    }
    return {std::move(ra), std::move(rb)};
  }
  const auto& ea = std::get<Embedding>(a);
  const auto& eb = std::get<Embedding>(b);
  if (ea.sample_ids == eb.sample_ids) return {a, b};
  Embedding ra{{}, Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), ea.coords.cols()), ea.flags};
  Embedding rb{{}, Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), eb.coords.cols()), eb.flags};
  for (std::size_t m = 0; m < rows.size(); ++m) {
    const auto [i, j] = rows[m];
    ra.sample_ids.push_back(ea.sample_ids[i]);
    rb.sample_ids.push_back(ea.sample_ids[i]);
    ra.coords.row(static_cast<Eigen::Index>(m)) = ea.coords.row(static_cast<Eigen::Index>(i));
    rb.coords.row(static_cast<Eigen::Index>(m)) = eb.coords.row(static_cast<Eigen::Index>(j));
  }
  return {std::move(ra), std::move(rb)};
}

std::optional<double> pair_score(const Interpretation& a, const Interpretation& b,
                                 const MetricSpec& spec) {
  check_same_kind(a, b);
  if (const auto* ra = std::get_if<FeatureRanking>(&a)) {
    return metrics::rank_similarity(spec.rank, *ra, std::get<FeatureRanking>(b),
                                    std::min(spec.k, ra->size()), spec.kendall_p);
  }
  if (common_samples(a, b) < 2) return std::nullopt;
  const auto [x, y] = align_on_common(a, b);
  if (const auto* ca = std::get_if<ClusterLabeling>(&x)) {
    return metrics::partition_similarity(spec.partition, *ca, std::get<ClusterLabeling>(y));
  }
  return metrics::nn_jaccard_auc(std::get<Embedding>(x), std::get<Embedding>(y), spec.nn_grid,
                                 spec.nn_sample_cap, spec.nn_seed)
      .auc;
}

double ordered_mean(std::vector<double> values) {
  if (values.empty()) throw ValidationError("mean of an empty set");
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

PairwiseSummary within_method(const std::vector<std::optional<InterpretationArtifact>>& repeats,
                              const MetricSpec& spec) {
  PairwiseSummary out;
  out.repeats_total = repeats.size();
  out.repeats_ok = repeats.size() - failed(repeats);
  const std::size_t n_failed = out.repeats_total - out.repeats_ok;
  if (static_cast<double>(n_failed) > kMaxFailureFraction * static_cast<double>(out.repeats_total)) {
    out.note = "missing: " + std::to_string(n_failed) + " of " + std::to_string(out.repeats_total) +
               " repeats failed";
    return out;
  }
  std::vector<double> scores;
  for (std::size_t i = 0; i < repeats.size(); ++i) {
    if (!repeats[i]) continue;
    for (std::size_t j = i + 1; j < repeats.size(); ++j) {
      if (!repeats[j]) continue;
      const auto s = pair_score(repeats[i]->value, repeats[j]->value, spec);
      if (s) {
        scores.push_back(*s);
      } else {
        ++out.skipped_pairs;
      }
    }
  }
  out.pairs = scores.size();
  if (scores.empty()) {
    out.note = out.repeats_ok < 2 ? "missing: fewer than 2 successful repeats"
                                  : "missing: every pair shares fewer than 2 samples";
    return out;
  }
  out.mean = ordered_mean(std::move(scores));
  return out;
}

PairwiseSummary between_method(const std::vector<std::optional<InterpretationArtifact>>& a,
                               const std::vector<std::optional<InterpretationArtifact>>& b,
                               const MetricSpec& spec) {
  if (a.size() != b.size()) throw ValidationError("methods ran different numbers of repeats");
  PairwiseSummary out;
  out.repeats_total = a.size();
  const std::size_t n_failed = std::max(failed(a), failed(b));
  std::vector<double> scores;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (!a[r] || !b[r]) continue;
    if (a[r]->plan_hash != b[r]->plan_hash) {
      throw ValidationError("repeat " + std::to_string(r) + " comes from different perturbation plans");
    }
    ++out.repeats_ok;
    const auto s = pair_score(a[r]->value, b[r]->value, spec);
    if (s) {
      scores.push_back(*s);
    } else {
      ++out.skipped_pairs;
    }
  }
  out.pairs = scores.size();
  if (static_cast<double>(n_failed) > kMaxFailureFraction * static_cast<double>(out.repeats_total)) {
    out.note = "missing: more than half of the repeats failed";
    return out;
  }
  if (scores.empty()) {
    out.note = "missing: no comparable repeat";
    return out;
  }
  out.mean = ordered_mean(std::move(scores));
  return out;
}

}  // namespace stabx::stability
