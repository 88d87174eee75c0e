#include "stabx/learners/kmeans.hpp"

#include <limits>
#include <numeric>

#include "stabx/core/errors.hpp"

namespace stabx::learners {
namespace {

void check_k(const Eigen::MatrixXd& data, int k) {
  if (k < 1) throw ValidationError("number of clusters must be >= 1");
  if (data.rows() < k) throw ValidationError("number of clusters exceeds number of samples");
}

ClusterLabeling to_labeling(const TabularDataset& data, const KMeansResult& r, int k) {
  ClusterLabeling out{data.sample_ids(), r.labels, k};
  out.validate();
  return out;
}

// Index of a row drawn with probability proportional to `weights`.
Eigen::Index weighted_draw(const Eigen::VectorXd& weights, Rng& rng) {
  const double total = weights.sum();
  if (!(total > 0.0)) return static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(weights.size())));
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights(i);
    if (target < acc && weights(i) > 0.0) return i;
  }
  for (Eigen::Index i = weights.size() - 1; i >= 0; --i) {
    if (weights(i) > 0.0) return i;
  }
  return 0;
}

}  // namespace

std::string_view to_string(KMeansInit init) {
  return init == KMeansInit::random ? "random" : "kmeanspp";
}

Eigen::MatrixXd initial_centers(const Eigen::MatrixXd& data, int k, KMeansInit init, Rng& rng) {
  check_k(data, k);
  const auto n = static_cast<std::size_t>(data.rows());
  Eigen::MatrixXd centers(k, data.cols());
  if (init == KMeansInit::random) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.partial_shuffle(idx, static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) centers.row(c) = data.row(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
    return centers;
  }
  centers.row(0) = data.row(static_cast<Eigen::Index>(rng.index(n)));
  Eigen::VectorXd d2 = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    centers.row(c) = data.row(weighted_draw(d2, rng));
    d2 = d2.cwiseMin((data.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

std::vector<int> assign_nearest(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centers,
                                double* inertia) {
  std::vector<int> labels(static_cast<std::size_t>(data.rows()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (data.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    total += best_d;
  }
  if (inertia) *inertia = total;
  return labels;
}

KMeansResult lloyd(const Eigen::MatrixXd& data, Eigen::MatrixXd centers, std::size_t max_iter) {
  check_k(data, static_cast<int>(centers.rows()));
  const Eigen::Index k = centers.rows();
  KMeansResult out;
  double inertia = 0.0;
  out.labels = assign_nearest(data, centers, &inertia);
  out.inertia_trace.push_back(inertia);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, data.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const int c = out.labels[static_cast<std::size_t>(i)];
      sums.row(c) += data.row(i);
      counts(c) += 1.0;
    }
    std::vector<bool> taken(static_cast<std::size_t>(data.rows()), false);
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts(c) > 0.0) {
        centers.row(c) = sums.row(c) / counts(c);
        continue;
      }
      // Farthest row from its own center, first on ties.
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        const double d = (data.row(i) - centers.row(out.labels[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      taken[static_cast<std::size_t>(far)] = true;
      centers.row(c) = data.row(far);
      ++out.reseeds;
    }
    std::vector<int> next = assign_nearest(data, centers, &inertia);
    out.inertia_trace.push_back(inertia);
    ++out.iterations;
    const bool same = next == out.labels;
    out.labels = std::move(next);
    if (same) break;
  }
  out.centers = std::move(centers);
  out.inertia = out.inertia_trace.back();
  return out;
}

KMeansResult kmeans_detail(const Eigen::MatrixXd& data, int k, const KMeansOptions& options) {
  check_k(data, k);
  if (options.n_init == 0) throw ValidationError("n_init must be >= 1");
  KMeansResult best;
  bool have = false;
  for (std::size_t run = 0; run < options.n_init; ++run) {
    Rng rng(derive_seed(options.seed, run));
    KMeansResult r = lloyd(data, initial_centers(data, k, options.init, rng), options.max_iter);
    if (!have || r.inertia < best.inertia) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

ClusterLabeling kmeans(const TabularDataset& data, int k, const KMeansOptions& options) {
  return to_labeling(data, kmeans_detail(data.features(), k, options), k);
}

KMeansResult minibatch_kmeans_detail(const Eigen::MatrixXd& data, int k,
                                     const MiniBatchOptions& options,
                                     const Eigen::MatrixXd* init) {
  check_k(data, k);
  if (options.batch_size == 0) throw ValidationError("batch size must be >= 1");
  const auto n = static_cast<std::size_t>(data.rows());
  Rng rng(options.seed);
  Eigen::MatrixXd centers = init ? *init : initial_centers(data, k, KMeansInit::kmeanspp, rng);
  if (centers.rows() != k || centers.cols() != data.cols()) {
    throw ValidationError("initial centers have the wrong shape");
  }
  const bool full = options.batch_size >= n;
  const std::size_t b = full ? n : options.batch_size;
  std::vector<std::size_t> idx(n);
  std::vector<int> nearest(b);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);

  KMeansResult out;
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (!full) rng.partial_shuffle(idx, b);
    for (std::size_t m = 0; m < b; ++m) {
      const auto i = static_cast<Eigen::Index>(idx[m]);
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = (data.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      nearest[m] = best;
    }
    for (std::size_t m = 0; m < b; ++m) {
      const int c = nearest[m];
      counts(c) += 1.0;
      const double eta = 1.0 / counts(c);
      centers.row(c) = (1.0 - eta) * centers.row(c) + eta * data.row(static_cast<Eigen::Index>(idx[m]));
    }
    ++out.iterations;
  }
  double inertia = 0.0;
  out.labels = assign_nearest(data, centers, &inertia);
  out.inertia = inertia;
  out.inertia_trace.push_back(inertia);
  out.centers = std::move(centers);
  return out;
}

ClusterLabeling minibatch_kmeans(const TabularDataset& data, int k,
                                 const MiniBatchOptions& options) {
  return to_labeling(data, minibatch_kmeans_detail(data.features(), k, options), k);
}

}  // namespace stabx::learners
