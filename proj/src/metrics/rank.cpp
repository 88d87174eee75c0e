#include "stabx/metrics/rank.hpp"

#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "stabx/core/errors.hpp"

namespace stabx::metrics {
namespace {

constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

std::size_t checked_k(const FeatureRanking& a, const FeatureRanking& b, std::size_t k) {
  if (a.size() != b.size()) {
    throw ValidationError("rankings cover different feature universes (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (k == 0) throw ValidationError("k must be >= 1");
  if (k > a.size()) {
    spdlog::warn("k = {} exceeds the {} features; clamped", k, a.size());
    return a.size();
  }
  return k;
}

std::span<const std::size_t> top(const FeatureRanking& r, std::size_t k) {
  return std::span<const std::size_t>(r.order()).first(k);
}

std::vector<std::size_t> positions(std::span<const std::size_t> list, std::size_t universe) {
  std::vector<std::size_t> pos(universe, kAbsent);
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i] >= universe) throw ValidationError("item id outside the universe");
    pos[list[i]] = i;
  }
  return pos;
}

}  // namespace

std::string_view to_string(RankMetric metric) {
  switch (metric) {
    case RankMetric::jaccard:
      return "jaccard";
    case RankMetric::ao:
      return "ao";
    case RankMetric::kendall:
      return "kendall";
  }
  return "unknown";
}

RankMetric parse_rank_metric(std::string_view text) {
  if (text == "jaccard") return RankMetric::jaccard;
  if (text == "ao") return RankMetric::ao;
  if (text == "kendall") return RankMetric::kendall;
  throw ValidationError("unknown rank metric '" + std::string(text) + "'");
}

double jaccard_lists(std::span<const std::size_t> a, std::span<const std::size_t> b,
                     std::size_t universe) {
  const auto in_a = positions(a, universe);
  std::size_t inter = 0;
  for (std::size_t x : b) {
    if (x >= universe) throw ValidationError("item id outside the universe");
    inter += in_a[x] != kAbsent;
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double average_overlap_lists(std::span<const std::size_t> a, std::span<const std::size_t> b,
                             std::size_t universe) {
  if (a.size() != b.size()) throw ValidationError("top-k lists differ in length");
  if (a.empty()) return 1.0;
  std::vector<char> seen_a(universe, 0), seen_b(universe, 0);
  std::size_t overlap = 0;
  double total = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d] >= universe || b[d] >= universe) throw ValidationError("item id outside the universe");
    seen_a[a[d]] = 1;
    overlap += seen_b[a[d]];
    seen_b[b[d]] = 1;
    overlap += seen_a[b[d]];
    total += static_cast<double>(overlap) / static_cast<double>(d + 1);
  }
  return total / static_cast<double>(a.size());
}

double kendall_lists(std::span<const std::size_t> a, std::span<const std::size_t> b,
                     std::size_t universe, double p) {
  const auto pa = positions(a, universe);
  const auto pb = positions(b, universe);
  std::vector<std::size_t> u(a.begin(), a.end());
  for (std::size_t x : b) {
    if (pa[x] == kAbsent) u.push_back(x);
  }
  const std::size_t m = u.size();
  if (m < 2) return 1.0;

  // An absent item ranks behind every listed one, so the implied order of
  // (i, j) in a list is known unless both are absent.
  auto ahead = [](std::size_t pi, std::size_t pj) { return pi < pj; };
  double distance = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t t = s + 1; t < m; ++t) {
      const std::size_t i = u[s], j = u[t];
      const bool ia = pa[i] != kAbsent, ja = pa[j] != kAbsent;
      const bool ib = pb[i] != kAbsent, jb = pb[j] != kAbsent;
      if ((ia && ja && !ib && !jb) || (ib && jb && !ia && !ja)) {
        distance += p;
      } else if ((ia && !ja && jb && !ib) || (ja && !ia && ib && !jb)) {
        distance += 1.0;
      } else if (ahead(pa[i], pa[j]) != ahead(pb[i], pb[j])) {
        distance += 1.0;
      }
    }
  }
  const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
  // One division keeps integer and half-integer distances exact.
  return (pairs - 2.0 * distance) / pairs;
}

double jaccard_at_k(const FeatureRanking& a, const FeatureRanking& b, std::size_t k) {
  k = checked_k(a, b, k);
  return jaccard_lists(top(a, k), top(b, k), a.size());
}

double average_overlap(const FeatureRanking& a, const FeatureRanking& b, std::size_t k) {
  k = checked_k(a, b, k);
  return average_overlap_lists(top(a, k), top(b, k), a.size());
}

double kendall_topk(const FeatureRanking& a, const FeatureRanking& b, std::size_t k, double p) {
  k = checked_k(a, b, k);
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("kendall penalty p must lie in [0, 1]");
  return kendall_lists(top(a, k), top(b, k), a.size(), p);
}

double rank_similarity(RankMetric metric, const FeatureRanking& a, const FeatureRanking& b,
                       std::size_t k, double kendall_p) {
  switch (metric) {
    case RankMetric::jaccard:
      return jaccard_at_k(a, b, k);
    case RankMetric::ao:
      return average_overlap(a, b, k);
    case RankMetric::kendall:
      return kendall_topk(a, b, k, kendall_p);
  }
  return 0.0;
}

}  // namespace stabx::metrics
