#pragma once

// Brute-force reference implementations used to check the metric modules.
// They follow the textbook definitions directly and share no code with the
// library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace stabx::testing::oracle {

using Labels = std::vector<int>;

// ---- partitions ----

struct PairCounts {
  double same_both = 0, same_a = 0, same_b = 0, total = 0;
};

inline PairCounts count_pairs(const Labels& a, const Labels& b) {
  PairCounts c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      c.same_both += sa && sb;
      c.same_a += sa;
      c.same_b += sb;
      c.total += 1;
    }
  }
  return c;
}

// Hubert-Arabie form over the 2x2 pair-agreement table.
inline double ari(const Labels& a, const Labels& b) {
  const auto c = count_pairs(a, b);
  const double n11 = c.same_both, n10 = c.same_a - c.same_both, n01 = c.same_b - c.same_both;
  const double n00 = c.total - n11 - n10 - n01;
  const double denom = (n11 + n10) * (n10 + n00) + (n11 + n01) * (n01 + n00);
  if (denom == 0.0) return 1.0;
  return 2.0 * (n11 * n00 - n10 * n01) / denom;
}

inline double fm(const Labels& a, const Labels& b) {
  const auto c = count_pairs(a, b);
  if (c.same_a == 0 && c.same_b == 0) return 1.0;
  if (c.same_a == 0 || c.same_b == 0) return 0.0;
  return c.same_both / std::sqrt(c.same_a * c.same_b);
}

struct Joint {
  std::map<std::pair<int, int>, double> pab;
  std::map<int, double> pa, pb;
};

inline Joint joint(const Labels& a, const Labels& b) {
  Joint j;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    j.pab[{a[i], b[i]}] += 1.0 / n;
    j.pa[a[i]] += 1.0 / n;
    j.pb[b[i]] += 1.0 / n;
  }
  return j;
}

inline double mi(const Labels& a, const Labels& b) {
  const auto j = joint(a, b);
  double total = 0.0;
  for (const auto& [ab, p] : j.pab) total += p * std::log(p / (j.pa.at(ab.first) * j.pb.at(ab.second)));
  return total;
}

inline double entropy(const std::map<int, double>& p) {
  double h = 0.0;
  for (const auto& [_, q] : p) h -= q * std::log(q);
  return h;
}

// Homogeneity and completeness from conditional entropies.
inline double v_measure(const Labels& a, const Labels& b) {
  const auto j = joint(a, b);
  double h_a_given_b = 0.0, h_b_given_a = 0.0;
  for (const auto& [ab, p] : j.pab) {
    h_a_given_b -= p * std::log(p / j.pb.at(ab.second));
    h_b_given_a -= p * std::log(p / j.pa.at(ab.first));
  }
  const double ha = entropy(j.pa), hb = entropy(j.pb);
  const double h = ha == 0.0 ? 1.0 : 1.0 - h_a_given_b / ha;
  const double c = hb == 0.0 ? 1.0 : 1.0 - h_b_given_a / hb;
  return h + c == 0.0 ? 0.0 : 2.0 * h * c / (h + c);
}

// Restricted growth strings: every set partition of n items into at most
// max_blocks blocks, once each.
inline void partitions(std::size_t n, int max_blocks, Labels& cur, int used, std::vector<Labels>& out) {
  if (cur.size() == n) {
    out.push_back(cur);
    return;
  }
  for (int l = 0; l <= std::min(used, max_blocks - 1); ++l) {
    cur.push_back(l);
    partitions(n, max_blocks, cur, std::max(used, l + 1), out);
    cur.pop_back();
  }
}

inline std::vector<Labels> partitions(std::size_t n, int max_blocks) {
  std::vector<Labels> out;
  Labels cur;
  partitions(n, max_blocks, cur, 0, out);
  return out;
}

// ---- top-k lists ----

inline double jaccard(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::set<std::size_t> sa(a.begin(), a.end()), sb(b.begin(), b.end()), u = sa;
  u.insert(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (auto x : sa) inter += sb.count(x);
  return static_cast<double>(inter) / static_cast<double>(u.size());
}

inline double average_overlap(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  double total = 0.0;
  for (std::size_t d = 1; d <= a.size(); ++d) {
    std::set<std::size_t> sa(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(d));
    std::size_t inter = 0;
    for (std::size_t i = 0; i < d; ++i) inter += sa.count(b[i]);
    total += static_cast<double>(inter) / static_cast<double>(d);
  }
  return total / static_cast<double>(a.size());
}

// Fagin's four cases for each pair of the union.
inline double kendall(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b, double p) {
  auto pos = [](const std::vector<std::size_t>& l, std::size_t x) -> long {
    auto it = std::find(l.begin(), l.end(), x);
    return it == l.end() ? -1 : static_cast<long>(it - l.begin());
  };
  std::vector<std::size_t> u = a;
  for (auto x : b) {
    if (pos(a, x) < 0) u.push_back(x);
  }
  if (u.size() < 2) return 1.0;
  double k = 0.0;
  for (std::size_t s = 0; s < u.size(); ++s) {
    for (std::size_t t = s + 1; t < u.size(); ++t) {
      const long ai = pos(a, u[s]), aj = pos(a, u[t]), bi = pos(b, u[s]), bj = pos(b, u[t]);
      const int in_a = (ai >= 0) + (aj >= 0), in_b = (bi >= 0) + (bj >= 0);
      if (in_a == 2 && in_b == 2) {
        k += ((ai < aj) != (bi < bj)) ? 1.0 : 0.0;
      } else if (in_a == 2 && in_b == 1) {
        // B ranks its listed item ahead of the missing one.
        const bool b_says_i_first = bi >= 0;
        k += ((ai < aj) != b_says_i_first) ? 1.0 : 0.0;
      } else if (in_b == 2 && in_a == 1) {
        const bool a_says_i_first = ai >= 0;
        k += ((bi < bj) != a_says_i_first) ? 1.0 : 0.0;
      } else if (in_a == 1 && in_b == 1) {
        // One item only in A, the other only in B.
        k += 1.0;
      } else {
        k += p;
      }
    }
  }
  const double pairs = static_cast<double>(u.size() * (u.size() - 1)) / 2.0;
  return 1.0 - 2.0 * k / pairs;
}

// ---- neighbor graphs ----

// Direct enumeration: sort all other rows by (distance, index).
inline std::set<std::size_t> neighbors(const Eigen::MatrixXd& x, std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    if (static_cast<std::size_t>(j) == i) continue;
    d.push_back({(x.row(j) - x.row(static_cast<Eigen::Index>(i))).squaredNorm(), static_cast<std::size_t>(j)});
  }
  std::sort(d.begin(), d.end());
  std::set<std::size_t> out;
  for (std::size_t m = 0; m < k; ++m) out.insert(d[m].second);
  return out;
}

inline double nn_jaccard(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t k) {
  double total = 0.0;
  const auto n = static_cast<std::size_t>(a.rows());
  for (std::size_t i = 0; i < n; ++i) {
    const auto sa = neighbors(a, i, k), sb = neighbors(b, i, k);
    std::size_t inter = 0;
    for (auto x : sa) inter += sb.count(x);
    total += static_cast<double>(inter) / static_cast<double>(2 * k - inter);
  }
  return total / static_cast<double>(n);
}

// Every k from 1 to N, trapezoids over (k - 1) / (N - 1).
inline double nn_auc(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<double> y;
  for (std::size_t k = 1; k < n; ++k) y.push_back(nn_jaccard(a, b, k));
  y.push_back(1.0);
  double area = 0.0;
  for (std::size_t m = 1; m < y.size(); ++m) area += (y[m] + y[m - 1]) / 2.0 / static_cast<double>(n - 1);
  return area;
}

}  // namespace stabx::testing::oracle
