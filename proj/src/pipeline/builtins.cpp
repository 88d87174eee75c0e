#include "stabx/pipeline/builtins.hpp"

#include <map>
#include <set>

#include "stabx/core/errors.hpp"
#include "stabx/learners/embedding.hpp"
#include "stabx/learners/hierarchical.hpp"
#include "stabx/learners/kmeans.hpp"
#include "stabx/learners/linear.hpp"
#include "stabx/learners/permutation.hpp"
#include "stabx/learners/spectral.hpp"

namespace stabx::pipeline {
namespace {

using learners::Affinity;

struct Spec {
  InterpretationKind kind;
  std::set<std::string> keys;
};

const std::map<std::string, Spec, std::less<>>& catalogue() {
  static const std::map<std::string, Spec, std::less<>> c{
      {"ridge", {InterpretationKind::feature_importance, {"folds"}}},
      {"lasso", {InterpretationKind::feature_importance, {"folds"}}},
      {"permutation", {InterpretationKind::feature_importance, {"folds", "model", "repeats"}}},
      {"kmeans", {InterpretationKind::clustering, {"n_init", "max_iter"}}},
      {"kmeanspp", {InterpretationKind::clustering, {"n_init", "max_iter"}}},
      {"minibatch_kmeans", {InterpretationKind::clustering, {"batch_size", "max_iter"}}},
      {"hierarchical", {InterpretationKind::clustering, {"linkage", "distance"}}},
      {"spectral", {InterpretationKind::clustering, {"affinity", "n_neighbors", "gamma"}}},
      {"pca", {InterpretationKind::dimension_reduction, {}}},
      {"random_projection", {InterpretationKind::dimension_reduction, {}}},
      {"mds", {InterpretationKind::dimension_reduction, {}}},
      {"isomap", {InterpretationKind::dimension_reduction, {"n_neighbors"}}},
      {"spectral_embedding",
       {InterpretationKind::dimension_reduction, {"affinity", "n_neighbors", "gamma"}}},
  };
  return c;
}

template <typename T>
T param(const nlohmann::json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  return params.at(key).get<T>();
}

learners::SpectralOptions spectral_options(const nlohmann::json& params, std::uint64_t seed) {
  learners::SpectralOptions o;
  o.affinity = learners::parse_affinity(param<std::string>(params, "affinity", "knn"));
  o.n_neighbors = param<std::size_t>(params, "n_neighbors", 10);
  if (params.contains("gamma")) o.gamma = params.at("gamma").get<double>();
  o.seed = seed;
  return o;
}

std::optional<PredictionSet> predict(const learners::Predictor& model, const TabularDataset* test) {
  if (!test) return std::nullopt;
  PredictionSet p{test->sample_ids(), model.predict(test->features()), *test->target(),
                  model.is_classifier()};
  p.validate();
  return p;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& [name, spec] : catalogue()) names.push_back(name);
  return names;
}

std::optional<InterpretationKind> builtin_kind(std::string_view name) {
  auto it = catalogue().find(name);
  if (it == catalogue().end()) return std::nullopt;
  return it->second.kind;
}

std::vector<std::string> check_builtin_params(std::string_view name, const nlohmann::json& params) {
  std::vector<std::string> problems;
  auto it = catalogue().find(name);
  if (it == catalogue().end()) {
    problems.push_back("unknown built-in method '" + std::string(name) + "'");
    return problems;
  }
  if (!params.is_object()) {
    problems.push_back("params of '" + std::string(name) + "' must be an object");
    return problems;
  }
  for (const auto& [key, value] : params.items()) {
    if (key == "method") continue;
    if (!it->second.keys.count(key)) {
      problems.push_back("built-in '" + std::string(name) + "' has no parameter '" + key + "'");
    }
  }
  try {
    if (params.contains("linkage")) learners::parse_linkage(params.at("linkage").get<std::string>());
    if (params.contains("distance")) {
      const auto d = params.at("distance").get<std::string>();
      if (d != "auto") learners::parse_distance(d);
    }
    if (params.contains("affinity")) learners::parse_affinity(params.at("affinity").get<std::string>());
    if (params.contains("model")) {
      const auto m = params.at("model").get<std::string>();
      if (m != "ridge" && m != "lasso") problems.push_back("permutation model must be ridge or lasso");
    }
    if (params.value("linkage", std::string("average")) == "ward" &&
        params.value("distance", std::string("euclidean")) != "euclidean" &&
        params.value("distance", std::string("euclidean")) != "auto") {
      problems.push_back("ward linkage requires euclidean distance");
    }
    for (const char* key : {"folds", "repeats", "n_init", "max_iter", "batch_size", "n_neighbors"}) {
      if (params.contains(key) && params.at(key).get<long long>() < 1) {
        problems.push_back(std::string("parameter '") + key + "' must be >= 1");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    problems.push_back("bad parameter type for '" + std::string(name) + "': " + e.what());
  } catch (const ValidationError& e) {
    problems.push_back(e.what());
  }
  return problems;
}

BuiltinOutput run_builtin(std::string_view name, const BuiltinInput& in) {
  if (!in.train) throw ValidationError("built-in method needs training data");
  const TabularDataset& train = *in.train;
  const nlohmann::json& p = in.params;
  auto need_k = [&]() {
    if (!in.k_clusters) throw ValidationError("clustering needs a cluster count");
    return *in.k_clusters;
  };
  auto need_rank = [&]() {
    if (!in.rank) throw ValidationError("dimension reduction needs a rank");
    return *in.rank;
  };

  if (name == "ridge" || name == "lasso" || name == "permutation") {
    learners::CvOptions cv;
    cv.folds = param<std::size_t>(p, "folds", 5);
    learners::Penalty penalty = name == "lasso" ? learners::Penalty::l1 : learners::Penalty::l2;
    if (name == "permutation" && param<std::string>(p, "model", "ridge") == "lasso") {
      penalty = learners::Penalty::l1;
    }
    const auto model = learners::LinearModel::fit(train, penalty, cv);
    if (name == "permutation") {
      if (!in.test) throw ValidationError("permutation importance needs a test set");
      return {learners::permutation_importance(model, *in.test, param<std::size_t>(p, "repeats", 10),
                                               in.seed),
              predict(model, in.test)};
    }
    return {FeatureRanking::from_scores(model.importance()), predict(model, in.test)};
  }
  if (name == "kmeans" || name == "kmeanspp") {
    learners::KMeansOptions o;
    o.init = name == "kmeans" ? learners::KMeansInit::random : learners::KMeansInit::kmeanspp;
    o.n_init = param<std::size_t>(p, "n_init", 10);
    o.max_iter = param<std::size_t>(p, "max_iter", 300);
    o.seed = in.seed;
    return {learners::kmeans(train, need_k(), o), std::nullopt};
  }
  if (name == "minibatch_kmeans") {
    learners::MiniBatchOptions o;
    o.batch_size = param<std::size_t>(p, "batch_size", 100);
    o.max_iter = param<std::size_t>(p, "max_iter", 100);
    o.seed = in.seed;
    return {learners::minibatch_kmeans(train, need_k(), o), std::nullopt};
  }
  if (name == "hierarchical") {
    const auto linkage = learners::parse_linkage(param<std::string>(p, "linkage", "average"));
    const std::string dist = param<std::string>(p, "distance", "euclidean");
    if (dist == "auto") throw ValidationError("distance 'auto' must be resolved before running");
    return {learners::hierarchical(train, need_k(), linkage, learners::parse_distance(dist)),
            std::nullopt};
  }
  if (name == "spectral") {
    return {learners::spectral_cluster(train, need_k(), spectral_options(p, in.seed)), std::nullopt};
  }
  if (name == "pca") return {learners::pca(train, need_rank()), std::nullopt};
  if (name == "random_projection") {
    return {learners::random_projection(train, need_rank(), in.seed), std::nullopt};
  }
  if (name == "mds") return {learners::metric_mds(train, need_rank()), std::nullopt};
  if (name == "isomap") {
    return {learners::isomap(train, need_rank(), param<std::size_t>(p, "n_neighbors", 5)), std::nullopt};
  }
  if (name == "spectral_embedding") {
    return {learners::spectral_embedding(train, need_rank(), spectral_options(p, in.seed)),
            std::nullopt};
  }
  throw ValidationError("unknown built-in method '" + std::string(name) + "'");
}

}  // namespace stabx::pipeline
