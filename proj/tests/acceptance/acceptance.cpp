// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <signal.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>
#include <json.hpp>

#include "stabx/core/dataset.hpp"
#include "stabx/core/random.hpp"
#include "stabx/metrics/neighbors.hpp"
#include "stabx/metrics/partition.hpp"
#include "stabx/metrics/rank.hpp"
#include "stabx/pipeline/config.hpp"
#include "stabx/perturb/plan.hpp"
#include "stabx/pipeline/pipeline.hpp"
#include "stabx/runner/invoke.hpp"
#include "stabx/stability/association.hpp"
#include "stabx/stability/prediction.hpp"
#include "stabx/stability/table.hpp"
#include "support/oracles.hpp"
#include "support/testdata.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace stabx;
namespace oracle = stabx::testing::oracle;
using stabx::testing::TempDir;

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleTol = 1e-12;
constexpr double kPartitionBudgetS = 60.0;
constexpr double kRankBudgetS = 10.0;
constexpr double kNnIdentityTol = 1e-12;
constexpr double kNnGridTol = 0.03;
constexpr double kNnBudgetS = 30.0;
constexpr double kEndToEndBudgetS = 120.0;
constexpr double kRankStabilityMin = 0.9;
constexpr double kClusterStabilityMin = 0.95;
constexpr double kBetweenMin = 0.95;
constexpr double kCorrelatedPMax = 0.01;
constexpr double kTimeoutFactor = 2.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json read_json(const fs::path& path) { return json::parse(testing::read_text(path)); }

// Runs the pipeline on `config` (paths relative to `dir`) and returns scores.json.
json run_config(const fs::path& dir, const json& config, std::size_t workers, const std::string& out) {
  auto cfg = pipeline::PipelineConfig::from_json(config, dir);
  pipeline::PipelineOptions options;
  options.workers = workers;
  options.output_dir = dir / out;
  const auto summary = pipeline::run_pipeline(cfg, options);
  return read_json(summary.run_dir / "scores" / "scores.json");
}

std::optional<double> cell(const json& scores, const std::string& kind, const std::string& dataset,
                           const std::string& method) {
  const auto t = stability::StabilityTable::from_json(scores.at("within").at(kind));
  for (std::size_t d = 0; d < t.datasets.size(); ++d) {
    for (std::size_t m = 0; m < t.methods.size(); ++m) {
      if (t.datasets[d] == dataset && t.methods[m] == method) return t.at(d, m).value;
    }
  }
  return std::nullopt;
}

std::string show(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "missing"; }

void write_blob_csv(const fs::path& path, const Eigen::MatrixXd& points, const std::vector<int>& truth) {
  Eigen::VectorXd labels(static_cast<Eigen::Index>(truth.size()));
  for (std::size_t i = 0; i < truth.size(); ++i) labels(static_cast<Eigen::Index>(i)) = truth[i];
  const auto n = truth.size();
  write_csv(TabularDataset(testing::row_ids(n), points, testing::column_names(static_cast<std::size_t>(points.cols())),
                           labels, TaskKind::classification, {"a", "b", "c"}),
            path, "label");
}

testing::Blobs separated_blobs() {
  Eigen::MatrixXd centers(3, 2);
  centers << 0, 0, 10, 0, 0, 10;
  return testing::gaussian_blobs(300, centers, 1.0, 31);
}

// Replaces 5% of the rows by points drawn uniformly, per feature, over the
// feature's range widened by half its width on each side.
Eigen::MatrixXd with_uniform_outliers(const Eigen::MatrixXd& points, std::uint64_t seed) {
  Eigen::MatrixXd out = points;
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  const std::size_t count = n / 20;
  rng.partial_shuffle(rows, count);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double lo = points.col(j).minCoeff(), hi = points.col(j).maxCoeff(), w = hi - lo;
    for (std::size_t r = 0; r < count; ++r) {
      out(static_cast<Eigen::Index>(rows[r]), j) = lo - w / 2.0 + 2.0 * w * rng.uniform();
    }
  }
  return out;
}

bool process_alive(long pid) {
  std::ifstream stat("/proc/" + std::to_string(pid) + "/stat");
  if (!stat) return false;
  std::string line;
  std::getline(stat, line);
  const auto close = line.rfind(')');
  return close != std::string::npos && line.size() > close + 2 && line[close + 2] != 'Z';
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = testing::read_text(e.path());
  }
  return files;
}

// ---- criteria ----

Outcome partition_oracles() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t compared = 0, mismatches = 0;
  double worst = 0.0;
  for (std::size_t n = 2; n <= 7; ++n) {
    const auto all = oracle::partitions(n, 3);
    for (const auto& a : all) {
      for (const auto& b : all) {
        const auto t = metrics::contingency(a, b);
        const double diffs[] = {
            std::abs(metrics::ari(t) - oracle::ari(a, b)),
            std::abs(metrics::fowlkes_mallows(t) - oracle::fm(a, b)),
            std::abs(metrics::mutual_information(t) - oracle::mi(a, b)),
            std::abs(metrics::v_measure(t) - oracle::v_measure(a, b)),
        };
        for (double d : diffs) {
          worst = std::max(worst, d);
          if (!(d <= kOracleTol)) ++mismatches;
        }
        ++compared;
      }
    }
  }
  const double elapsed = seconds_since(start);
  o.check(compared == 150015, fmt::format("{} pairs compared, expected 150015", compared));
  o.check(mismatches == 0, fmt::format("{} values off by more than {}", mismatches, kOracleTol));
  o.check(elapsed < kPartitionBudgetS, fmt::format("runtime {:.1f}s", elapsed));
  o.note(fmt::format("{} partition pairs, max deviation {:.2e}, {:.1f}s", compared, worst, elapsed));
  return o;
}

FeatureRanking ranking_from_order(const std::vector<std::size_t>& order) {
  std::vector<double> scores(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) scores[order[i]] = static_cast<double>(order.size() - i);
  return FeatureRanking::from_scores(scores);
}

std::vector<std::size_t> top(const FeatureRanking& r, std::size_t k) {
  return {r.order().begin(), r.order().begin() + static_cast<std::ptrdiff_t>(k)};
}

Outcome rank_ground_cases() {
  using metrics::RankMetric;
  Outcome o;
  const auto start = Clock::now();
  const auto a = ranking_from_order({1, 2, 3, 0, 4, 5}), b = ranking_from_order({1, 2, 4, 0, 3, 5});
  o.check(metrics::jaccard_at_k(a, b, 3) == 0.5, "jaccard@3 example != 0.5");
  const auto c = ranking_from_order({0, 1, 2, 3}), d = ranking_from_order({1, 0, 2, 3});
  o.check(metrics::average_overlap(c, d, 3) == 2.0 / 3.0, "AO@3 example != 2/3");
  const std::vector<std::size_t> l12{1, 2}, l21{2, 1}, l34{3, 4};
  o.check(metrics::kendall_lists(l12, l21, 5, 0.0) == -1.0, "reversed top-2 kendall != -1");
  o.check(metrics::kendall_lists(l12, l34, 5, 0.0) == -1.0 / 3.0, "disjoint top-2 kendall != -1/3");

  Rng rng(2024);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = 2 + rng.index(30);
    const std::size_t k = 1 + rng.index(p);
    const double penalty = static_cast<double>(rng.index(3)) / 2.0;
    std::vector<double> sa(p), sb(p);
    for (auto& s : sa) s = static_cast<double>(rng.index(p));
    for (auto& s : sb) s = static_cast<double>(rng.index(p));
    const auto ra = FeatureRanking::from_scores(sa), rb = FeatureRanking::from_scores(sb);
    const auto ta = top(ra, k), tb = top(rb, k);
    bool ok = std::abs(metrics::jaccard_at_k(ra, rb, k) - oracle::jaccard(ta, tb)) <= kOracleTol &&
              std::abs(metrics::average_overlap(ra, rb, k) - oracle::average_overlap(ta, tb)) <= kOracleTol &&
              std::abs(metrics::kendall_topk(ra, rb, k, penalty) - oracle::kendall(ta, tb, penalty)) <= kOracleTol;
    for (auto metric : {RankMetric::jaccard, RankMetric::ao, RankMetric::kendall}) {
      ok = ok && metrics::rank_similarity(metric, ra, rb, k, penalty) ==
                     metrics::rank_similarity(metric, rb, ra, k, penalty);
      ok = ok && metrics::rank_similarity(metric, ra, ra, k, penalty) == 1.0;
    }
    failures += !ok;
  }
  const double elapsed = seconds_since(start);
  o.check(failures == 0, fmt::format("{} of 1000 random pairs violate symmetry, identity or the oracles", failures));
  o.check(elapsed < kRankBudgetS, fmt::format("runtime {:.1f}s", elapsed));
  o.note(fmt::format("ground cases and 1000 random pairs, {:.2f}s", elapsed));
  return o;
}

Embedding embed(const Eigen::MatrixXd& coords) {
  return Embedding{testing::row_ids(static_cast<std::size_t>(coords.rows())), coords, {}};
}

Outcome nn_auc() {
  Outcome o;
  const auto start = Clock::now();
  const Eigen::MatrixXd a = testing::normal_matrix(100, 4, 5);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(testing::normal_matrix(4, 4, 6));
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd moved = a * q + Eigen::MatrixXd::Constant(100, 4, 3.0);
  const double identity = metrics::nn_jaccard_auc(embed(a), embed(a)).auc;
  const double isometry = metrics::nn_jaccard_auc(embed(a), embed(moved)).auc;
  o.check(std::abs(identity - 1.0) <= kNnIdentityTol, fmt::format("identity auc {:.15f}", identity));
  o.check(std::abs(isometry - 1.0) <= kNnIdentityTol, fmt::format("isometry auc {:.15f}", isometry));

  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd x = testing::normal_matrix(100, 3, 100 + seed);
    const Eigen::MatrixXd y = testing::normal_matrix(100, 3, 200 + seed);
    worst = std::max(worst, std::abs(metrics::nn_jaccard_auc(embed(x), embed(y)).auc - oracle::nn_auc(x, y)));
  }
  const double elapsed = seconds_since(start);
  o.check(worst <= kNnGridTol, fmt::format("gridded vs exhaustive gap {:.4f}", worst));
  o.check(elapsed < kNnBudgetS, fmt::format("runtime {:.1f}s", elapsed));
  o.note(fmt::format("gridded vs exhaustive max gap {:.4f} at N=100, {:.1f}s", worst, elapsed));
  return o;
}

Outcome prediction_arithmetic() {
  Outcome o;
  const std::vector<double> half{0, 1, 0, 1}, quarter{0, 1, 2, 3}, pair{0, 2};
  o.check(stability::label_agreement_score(half) == 0.5, "two equal classes != 0.5");
  o.check(stability::label_agreement_score(quarter) == 0.25, "four equal classes != 0.25");
  o.check(stability::spread_score(pair) == std::exp(-std::sqrt(2.0)), "spread of {0, 2} != exp(-sqrt 2)");
  o.note(fmt::format("{}, {}, {:.17g}", stability::label_agreement_score(half),
                     stability::label_agreement_score(quarter), stability::spread_score(pair)));
  return o;
}

Outcome q1_splits() {
  Outcome o;
  TempDir dir;
  const std::vector<double> beta{1.0, 0.8, 0.6, 0.4, 0.2};
  // Three evenly spaced target-noise levels from 0.1 to 5.
  const std::vector<double> noise = perturb::sigma_sweep(0.1, 5.0, 3);
  json datasets = json::array();
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const std::string id = fmt::format("sd{}", i);
    write_csv(testing::linear_regression_data(500, beta, 20, noise[i], 77), dir / (id + ".csv"), "y");
    datasets.push_back({{"id", id}, {"path", id + ".csv"}, {"task", "regression"}, {"target", "y"}});
  }
  const json config{{"seed", 3},
                    {"datasets", datasets},
                    {"methods", {{{"id", "ridge"}, {"builtin", "ridge"}}, {{"id", "lasso"}, {"builtin", "lasso"}}}},
                    {"perturbation", {{"split_ratio", 0.7}, {"repeats", 30}}}};
  const auto start = Clock::now();
  const auto scores = run_config(dir.path(), config, 1, "run");
  const double elapsed = seconds_since(start);
  for (const std::string method : {"ridge", "lasso"}) {
    std::vector<std::optional<double>> v;
    for (std::size_t i = 0; i < noise.size(); ++i) v.push_back(cell(scores, "feature_importance", fmt::format("sd{}", i), method));
    o.check(v[0] && *v[0] >= kRankStabilityMin, fmt::format("{} AO@10 at sd 0.1 is {}", method, show(v[0])));
    o.check(v[0] && v[1] && v[2] && *v[0] > *v[1] && *v[1] > *v[2],
            fmt::format("{} AO@10 not strictly decreasing over sd {}/{}/{}", method, noise[0], noise[1], noise[2]));
    o.note(fmt::format("{} AO@10 {} / {} / {}", method, show(v[0]), show(v[1]), show(v[2])));
  }
  o.check(elapsed < kEndToEndBudgetS, fmt::format("runtime {:.1f}s", elapsed));
  o.note(fmt::format("{:.1f}s", elapsed));
  return o;
}

json clustering_config(const std::vector<std::string>& datasets) {
  json ds = json::array();
  for (const auto& id : datasets) {
    ds.push_back({{"id", id}, {"path", id + ".csv"}, {"task", "unsupervised"}, {"truth", "label"}});
  }
  return json{{"seed", 8},
              {"datasets", ds},
              {"methods",
               {{{"id", "kmeans"}, {"builtin", "kmeans"}},
                {{"id", "kmeanspp"}, {"builtin", "kmeanspp"}},
                {{"id", "hc_single"},
                 {"builtin", "hierarchical"},
                 {"params", {{"linkage", "single"}, {"distance", "euclidean"}}}}}},
              {"perturbation", {{"subsample_fraction", 0.7}, {"repeats", 30}}}};
}

// Both clustering criteria share one run.
struct ClusteringRun {
  json scores;
  double seconds = 0.0;
};

const ClusteringRun& clustering_run() {
  static const ClusteringRun run = [] {
    static TempDir dir;
    const auto blobs = separated_blobs();
    write_blob_csv(dir / "blobs.csv", blobs.points, blobs.truth);
    write_blob_csv(dir / "outliers.csv", with_uniform_outliers(blobs.points, 32), blobs.truth);
    const auto start = Clock::now();
    ClusteringRun r;
    r.scores = run_config(dir.path(), clustering_config({"blobs", "outliers"}), 1, "run");
    r.seconds = seconds_since(start);
    return r;
  }();
  return run;
}

Outcome q1_clustering() {
  Outcome o;
  const auto& run = clustering_run();
  const auto kpp = cell(run.scores, "clustering", "blobs", "kmeanspp");
  const auto kpp_out = cell(run.scores, "clustering", "outliers", "kmeanspp");
  const auto hc_out = cell(run.scores, "clustering", "outliers", "hc_single");
  o.check(kpp && *kpp >= kClusterStabilityMin, fmt::format("kmeans++ ARI on blobs is {}", show(kpp)));
  o.check(kpp && hc_out && *kpp >= *hc_out, "kmeans++ ARI below single-linkage HC with outliers");
  o.check(kpp_out && hc_out && *kpp_out >= *hc_out, "on the outlier data kmeans++ ARI below single-linkage HC");
  o.check(run.seconds < kEndToEndBudgetS, fmt::format("runtime {:.1f}s", run.seconds));
  o.note(fmt::format("kmeans++ {} (blobs), {} (outliers); hc single {} (outliers); {:.1f}s", show(kpp), show(kpp_out),
                     show(hc_out), run.seconds));
  return o;
}

Outcome q2_between() {
  Outcome o;
  const auto& run = clustering_run();
  std::optional<double> value;
  for (const auto& row : run.scores.at("between").at("clustering")) {
    if (row.at("dataset") != "blobs") continue;
    const std::string a = row.at("method_a"), b = row.at("method_b");
    if ((a == "kmeans" && b == "kmeanspp") || (a == "kmeanspp" && b == "kmeans")) {
      if (!row.at("value").is_null()) value = row.at("value").get<double>();
    }
  }
  o.check(value && *value >= kBetweenMin, fmt::format("kmeans vs kmeans++ ARI is {}", show(value)));
  o.note(fmt::format("kmeans vs kmeans++ between-method ARI {}", show(value)));
  return o;
}

Outcome q3_association() {
  Outcome o;
  constexpr std::size_t kTests = 13;
  std::vector<double> x, flat, correlated;
  Rng rng(5);
  for (int i = 0; i < 25; ++i) {
    x.push_back(100.0 * (i + 1));
    flat.push_back(0.8);
    correlated.push_back(0.3 + 0.0002 * x.back() + 0.01 * rng.normal());
  }
  const auto f = stability::fit_association(x, flat, kTests);
  const auto c = stability::fit_association(x, correlated, kTests);
  o.check(f.p_corrected && *f.p_corrected == 1.0, "flat data corrected p != 1");
  o.check(c.p_corrected && *c.p_corrected < kCorrelatedPMax, "correlated data corrected p not below 0.01");
  o.note(fmt::format("flat p {}, correlated p {:.3g} (m = {})", show(f.p_corrected),
                     c.p_corrected.value_or(NAN), kTests));
  return o;
}

Outcome determinism() {
  Outcome o;
  TempDir dir;
  write_csv(testing::linear_regression_data(60, {2.0, -1.5, 1.0}, 6, 0.5, 4), dir / "reg.csv", "y");
  Eigen::MatrixXd centers(3, 2);
  centers << 0, 0, 10, 0, 0, 10;
  const auto blobs = testing::gaussian_blobs(45, centers, 0.5, 4);
  write_blob_csv(dir / "blobs.csv", blobs.points, blobs.truth);
  const json config = json::parse(R"({
    "seed": 12,
    "datasets": [
      {"id": "reg", "path": "reg.csv", "task": "regression", "target": "y"},
      {"id": "blobs", "path": "blobs.csv", "task": "unsupervised", "truth": "label"}],
    "methods": [
      {"id": "ridge", "builtin": "ridge"},
      {"id": "lasso", "builtin": "lasso"},
      {"id": "perm", "builtin": "permutation", "params": {"repeats": 3}},
      {"id": "km", "builtin": "kmeanspp"},
      {"id": "mbk", "builtin": "minibatch_kmeans"},
      {"id": "hc", "builtin": "hierarchical", "params": {"linkage": "average"}},
      {"id": "pca", "builtin": "pca"},
      {"id": "rp", "builtin": "random_projection"},
      {"id": "mds", "builtin": "mds"}],
    "perturbation": {"repeats": 6, "noise": {"sigmas": [0, 0.5, 1], "repeats": 3}},
    "metrics": {"dr_ranks": [1, 2]}
  })");
  run_config(dir.path(), config, 1, "w1");
  run_config(dir.path(), config, 8, "w8");
  const auto r1 = read_tree(dir / "w1" / "report"), r8 = read_tree(dir / "w8" / "report");
  const auto s1 = read_tree(dir / "w1" / "scores"), s8 = read_tree(dir / "w8" / "scores");
  o.check(!r1.empty(), "empty report bundle");
  o.check(r1 == r8, "report bundles differ between 1 and 8 workers");
  o.check(s1 == s8, "score files differ between 1 and 8 workers");
  o.note(fmt::format("{} report files and {} score files byte-identical at 1 and 8 workers", r1.size(), s1.size()));
  return o;
}

Outcome runner_protocol() {
  Outcome o;
  TempDir dir;
  write_csv(testing::linear_regression_data(60, {2.0, -1.5, 1.0}, 6, 0.5, 4), dir / "reg.csv", "y");
  Eigen::MatrixXd centers(3, 2);
  centers << 0, 0, 10, 0, 0, 10;
  const auto blobs = testing::gaussian_blobs(45, centers, 0.5, 4);
  write_blob_csv(dir / "blobs.csv", blobs.points, blobs.truth);
  const std::string runner = STABX_BUILTIN_RUNNER;
  const std::vector<std::tuple<std::string, std::string, std::string>> pairs{
      {"ridge", "feature_importance", "reg"},
      {"lasso", "feature_importance", "reg"},
      {"kmeanspp", "clustering", "blobs"},
      {"pca", "dimension_reduction", "blobs"}};
  json methods = json::array();
  for (const auto& [name, kind, dataset] : pairs) {
    methods.push_back({{"id", name}, {"builtin", name}, {"datasets", {dataset}}});
    methods.push_back({{"id", "ext_" + name},
                       {"command", {runner}},
                       {"task", kind},
                       {"params", {{"method", name}}},
                       {"datasets", {dataset}}});
  }
  const json config{{"seed", 21},
                    {"datasets",
                     {{{"id", "reg"}, {"path", "reg.csv"}, {"task", "regression"}, {"target", "y"}},
                      {{"id", "blobs"}, {"path", "blobs.csv"}, {"task", "unsupervised"}, {"truth", "label"}}}},
                    {"methods", methods},
                    {"perturbation", {{"repeats", 4}}},
                    {"metrics", {{"dr_ranks", {2}}}}};
  const auto scores = run_config(dir.path(), config, 1, "run");
  std::size_t compared = 0;
  for (const auto& [name, kind, dataset] : pairs) {
    const auto t = stability::StabilityTable::from_json(scores.at("within").at(kind));
    for (std::size_t d = 0; d < t.datasets.size(); ++d) {
      for (std::size_t m = 0; m < t.methods.size(); ++m) {
        const auto& method = t.methods[m];
        const auto split = pipeline::split_rank_variant(method);
        const std::string base = split ? split->first : method;
        if (base != name) continue;
        const std::string wrapped = split ? pipeline::rank_variant("ext_" + name, split->second) : "ext_" + name;
        const auto it = std::find(t.methods.begin(), t.methods.end(), wrapped);
        if (it == t.methods.end()) {
          o.check(false, wrapped + " missing from the table");
          continue;
        }
        const auto& a = t.at(d, m);
        const auto& b = t.at(d, static_cast<std::size_t>(it - t.methods.begin()));
        if (!a.value && !b.value) continue;
        o.check(a.value && b.value && *a.value == *b.value && a.repeats_ok == b.repeats_ok,
                fmt::format("{} on {}: builtin {} vs wrapped {}", method, t.datasets[d], show(a.value), show(b.value)));
        ++compared;
      }
    }
  }
  o.check(compared >= pairs.size(), fmt::format("only {} cells compared", compared));

  // Timeout fixture.
  runner::RunnerManifest m;
  m.task = InterpretationKind::clustering;
  m.train_path = dir / "blobs.csv";
  m.k_clusters = 3;
  m.timeout_seconds = 1;
  m.output_paths.interpretation = dir / "timeout_out.csv";
  runner::InvokeOptions options;
  options.log_dir = dir / "logs";
  fs::create_directories(options.log_dir);
  const auto start = Clock::now();
  const auto r = runner::invoke({std::string(STABX_FIXTURES_DIR) + "/sleep_runner.sh", (dir / "pids").string()}, m,
                                options);
  const double elapsed = seconds_since(start);
  o.check(r.status == runner::RunStatus::timeout, fmt::format("status {}", runner::to_string(r.status)));
  o.check(elapsed <= kTimeoutFactor * static_cast<double>(m.timeout_seconds),
          fmt::format("timeout took {:.2f}s", elapsed));
  std::ifstream pids(dir / "pids");
  long shell = 0, child = 0;
  if (pids >> shell >> child) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    o.check(!process_alive(shell) && !process_alive(child), "runner processes survived the timeout");
  } else {
    o.check(false, "fixture did not record its process ids");
  }
  o.note(fmt::format("{} builtin/wrapped cells bit-identical; timeout after {:.2f}s, no survivors", compared, elapsed));
  return o;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"partition metrics match exhaustive oracles", partition_oracles},
      {"rank metric ground cases and properties", rank_ground_cases},
      {"nn jaccard auc identity, isometry and grid accuracy", nn_auc},
      {"prediction stability arithmetic", prediction_arithmetic},
      {"Q1 feature importance over splits", q1_splits},
      {"Q1 clustering over subsamples", q1_clustering},
      {"Q2 kmeans vs kmeans++ agreement", q2_between},
      {"Q3 association plumbing", q3_association},
      {"determinism across worker counts", determinism},
      {"runner protocol", runner_protocol},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s  %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
