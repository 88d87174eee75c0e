#include "stabx/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "stabx/core/csv.hpp"
#include "stabx/core/dataset.hpp"
#include "stabx/core/random.hpp"
#include "stabx/learners/hierarchical.hpp"
#include "stabx/metrics/partition.hpp"
#include "stabx/pipeline/builtins.hpp"
#include "stabx/pipeline/report.hpp"
#include "stabx/pipeline/score.hpp"
#include "stabx/runner/invoke.hpp"

namespace stabx::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace layout {
fs::path run_info(const fs::path& run) { return run / "run.json"; }
fs::path dataset_info(const fs::path& run, const std::string& dataset) {
  return run / "datasets" / (dataset + ".json");
}
fs::path dataset_samples(const fs::path& run, const std::string& dataset) {
  return run / "datasets" / (dataset + ".samples.csv");
}
fs::path plan_file(const fs::path& run, const std::string& dataset, const std::string& plan) {
  return run / "plans" / dataset / (plan + ".json");
}
fs::path artifact_dir(const fs::path& run, const std::string& dataset, const std::string& method,
                      const std::string& plan) {
  return run / "artifacts" / dataset / method / plan;
}
fs::path work_dir(const fs::path& run, const std::string& dataset, const std::string& method,
                  const std::string& plan) {
  return run / "work" / dataset / method / plan;
}
}  // namespace layout

std::string noise_plan_name(double sigma) { return "noise_" + csv::format_double(sigma); }

std::string rank_variant(const std::string& method, std::size_t rank) {
  return method + "@r" + std::to_string(rank);
}

std::optional<std::pair<std::string, std::size_t>> split_rank_variant(std::string_view variant) {
  const auto at = variant.rfind("@r");
  if (at == std::string_view::npos || at + 2 >= variant.size()) return std::nullopt;
  const auto rank = csv::parse_int(variant.substr(at + 2));
  if (!rank || *rank < 1) return std::nullopt;
  return std::make_pair(std::string(variant.substr(0, at)), static_cast<std::size_t>(*rank));
}

namespace {

struct Prepared {
  const DatasetConfig* config = nullptr;
  TabularDataset data;
  std::string hash;
  std::optional<int> clusters;
  // Plans in execution order with their directory names.
  std::vector<std::pair<std::string, perturb::PerturbationPlan>> plans;
};

struct Variant {
  const MethodConfig* method = nullptr;
  std::string id;
  std::optional<std::size_t> rank;
  json params;
};

struct Unit {
  std::size_t dataset = 0;
  std::size_t variant = 0;
  std::size_t plan = 0;
  std::size_t repeat = 0;
};

struct Outcome {
  bool skipped = false;
  bool ok = false;
  std::exception_ptr fatal;
};

void write_json(const fs::path& path, const json& doc, int indent = 2) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(indent) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

std::optional<json> read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

TabularDataset without_target(const TabularDataset& d) {
  return TabularDataset(d.sample_ids(), d.features(), d.feature_names(), std::nullopt,
                        TaskKind::unsupervised);
}

Prepared prepare_dataset(const PipelineConfig& config, const DatasetConfig& cfg) {
  const bool supervised = cfg.task != TaskKind::unsupervised;
  TabularDataset raw = load_csv(cfg.path, LoadOptions{supervised ? cfg.target : cfg.truth, cfg.task,
                                                      cfg.id_column, {}});
  Prepared p{&cfg, config.standardize ? standardize(raw) : raw, "", std::nullopt, {}};
  p.hash = content_hash(p.data);
  if (!supervised) {
    if (cfg.clusters) {
      p.clusters = *cfg.clusters;
    } else if (p.data.target()) {
      p.clusters = static_cast<int>(p.data.num_classes());
    }
  }
  const auto plan_seed = [&](const std::string& name) {
    return derive_seed(config.seed, fnv1a64(cfg.id + "/" + name));
  };
  const auto& pc = config.perturbation;
  if (supervised) {
    p.plans.emplace_back("split", perturb::make_splits(p.data, pc.split_ratio, pc.repeats, plan_seed("split")));
  } else {
    p.plans.emplace_back("subsample", perturb::make_subsamples(p.data, pc.subsample_fraction, pc.repeats,
                                                               plan_seed("subsample")));
    if (pc.noise) {
      for (double sigma : pc.noise->sigmas) {
        const std::string name = noise_plan_name(sigma);
        p.plans.emplace_back(name, perturb::make_noise_plan(p.data.n_samples(), pc.noise->distribution,
                                                            sigma, pc.noise->repeats, plan_seed(name)));
      }
    }
  }
  return p;
}

// Picks the distance whose clustering of the full dataset best matches the
// truth labels; the first distance wins ties.
std::string resolve_distance(const Prepared& p, learners::Linkage linkage) {
  if (linkage == learners::Linkage::ward || !p.data.target() || !p.clusters) return "euclidean";
  std::vector<int> truth_labels;
  for (double y : *p.data.target()) truth_labels.push_back(static_cast<int>(y));
  std::string best;
  double best_score = -2.0;
  for (auto d : learners::kAllDistances) {
    const auto labels = learners::hierarchical_labels(p.data.features(), *p.clusters, linkage, d);
    const double s = metrics::partition_similarity(metrics::PartitionMetric::ari, labels, truth_labels);
    if (s > best_score) {
      best_score = s;
      best = std::string(learners::to_string(d));
    }
  }
  spdlog::info("dataset {}: hierarchical {} linkage uses {} distance (ari {:.4f})", p.config->id,
               learners::to_string(linkage), best, best_score);
  return best;
}

std::vector<Variant> expand_variants(const PipelineConfig& config, const Prepared& p) {
  std::vector<Variant> out;
  const std::size_t smallest_train = [&] {
    std::size_t n = p.data.n_samples();
    for (const auto& [name, plan] : p.plans) {
      for (const auto& d : plan.draws) n = std::min(n, d.retained.size());
    }
    return n;
  }();
  for (const auto& m : config.methods) {
    if (!config.applies(m, *p.config)) continue;
    json params = m.params;
    if (m.builtin && *m.builtin == "hierarchical" && params.value("distance", "") == "auto") {
      params["distance"] = resolve_distance(
          p, learners::parse_linkage(params.value("linkage", std::string("average"))));
    }
    if (m.kind != InterpretationKind::dimension_reduction) {
      out.push_back({&m, m.id, std::nullopt, params});
      continue;
    }
    for (std::size_t r : config.metrics.dr_ranks) {
      if (r > p.data.n_features() || r >= smallest_train) {
        spdlog::warn("dataset {}: rank {} skipped for {} (N={}, P={})", p.config->id, r, m.id,
                     smallest_train, p.data.n_features());
        continue;
      }
      out.push_back({&m, rank_variant(m.id, r), r, params});
    }
  }
  return out;
}

void write_dataset_files(const fs::path& run, const Prepared& p) {
  const bool classes = !p.data.class_names().empty();
  json info{{"id", p.config->id},
            {"task", std::string(to_string(p.config->task))},
            {"n_samples", p.data.n_samples()},
            {"n_features", p.data.n_features()},
            {"clusters", p.clusters ? json(*p.clusters) : json(nullptr)},
            {"class_names", p.data.class_names()},
            {"has_truth", p.data.target().has_value()},
            {"hash", p.hash}};
  write_json(layout::dataset_info(run, p.config->id), info);
  if (!p.data.target()) return;
  std::ofstream out(layout::dataset_samples(run, p.config->id), std::ios::binary);
  csv::write_row(out, std::vector<std::string>{"sample_id", "truth"});
  for (std::size_t i = 0; i < p.data.n_samples(); ++i) {
    const double y = (*p.data.target())(static_cast<Eigen::Index>(i));
    csv::write_row(out, std::vector<std::string>{
                            p.data.sample_ids()[i],
                            classes ? p.data.class_names()[static_cast<std::size_t>(y)] : csv::format_double(y)});
  }
  if (!out) throw Error("failed writing samples of " + p.config->id);
}

class Executor {
 public:
  Executor(const PipelineConfig& config, fs::path run, const std::vector<Prepared>& data,
           const std::vector<std::vector<Variant>>& variants)
      : config_(config), run_(std::move(run)), data_(data), variants_(variants) {}

  Outcome operator()(const Unit& u) const {
    Outcome outcome;
    try {
      execute(u, outcome);
    } catch (...) {
      outcome.fatal = std::current_exception();
    }
    return outcome;
  }

 private:
  void execute(const Unit& u, Outcome& outcome) const {
    const Prepared& p = data_[u.dataset];
    const Variant& v = variants_[u.dataset][u.variant];
    const auto& [plan_name, plan] = p.plans[u.plan];
    const perturb::RepeatDraw& draw = plan.draws[u.repeat];
    const std::uint64_t seed = derive_seed(draw.seed, 1);
    const std::string plan_hash = plan.hash();

    json key_doc{{"dataset", p.hash},
                 {"method", v.method->id},
                 {"builtin", v.method->builtin.value_or("")},
                 {"command", v.method->command},
                 {"params", v.params},
                 {"rank", v.rank ? json(*v.rank) : json(nullptr)},
                 {"clusters", p.clusters ? json(*p.clusters) : json(nullptr)},
                 {"plan", plan_hash},
                 {"repeat", u.repeat}};
    const std::string skip_key = hex64(fnv1a64(key_doc.dump()));

    const fs::path dir = layout::artifact_dir(run_, p.config->id, v.id, plan_name);
    const std::string stem = std::to_string(u.repeat);
    const fs::path artifact = dir / (stem + ".csv");
    const fs::path preds_path = dir / (stem + ".pred.csv");
    const fs::path meta_path = dir / (stem + ".json");
    const bool wants_predictions = plan.kind == perturb::PlanKind::split;

    if (const auto meta = read_json(meta_path)) {
      if (meta->value("status", "") == "ok" && meta->value("skip_key", "") == skip_key &&
          fs::exists(artifact) && (!wants_predictions || fs::exists(preds_path))) {
        outcome.skipped = true;
        outcome.ok = true;
        return;
      }
    }
    fs::create_directories(dir);
    fs::remove(artifact);
    fs::remove(preds_path);

    std::optional<TabularDataset> train;
    std::optional<TabularDataset> test;
    switch (plan.kind) {
      case perturb::PlanKind::split:
        train = p.data.subset(draw.retained);
        test = p.data.subset(draw.held_out);
        break;
      case perturb::PlanKind::subsample:
        train = p.data.subset(draw.retained);
        break;
      case perturb::PlanKind::noise:
        train = perturb::apply_noise(p.data, plan.distribution, plan.sigma, draw.seed);
        break;
    }

    std::string status = "ok";
    std::string reason;
    std::optional<Interpretation> value;
    std::optional<PredictionSet> predictions;
    if (v.method->builtin) {
      try {
        BuiltinInput in{&*train, test ? &*test : nullptr, p.clusters, v.rank, seed, v.params};
        auto out = run_builtin(*v.method->builtin, in);
        value = std::move(out.interpretation);
        predictions = std::move(out.predictions);
      } catch (const Error& e) {
        status = "crash";
        reason = e.what();
      }
    } else {
      const auto r = run_external(p, v, plan_name, u.repeat, *train, test, seed);
      status = std::string(runner::to_string(r.status));
      reason = r.reason;
      value = r.artifact;
      predictions = r.predictions;
    }

    if (status == "ok") {
      runner::write_interpretation(*value, artifact);
      if (predictions) runner::write_predictions(*predictions, preds_path, p.data.class_names(), true);
    } else {
      spdlog::warn("{}/{}/{}/{}: {} ({})", p.config->id, v.id, plan_name, u.repeat, status, reason);
    }
    json meta{{"dataset", p.config->id},
              {"method", v.id},
              {"kind", std::string(to_string(v.method->kind))},
              {"plan", plan_name},
              {"plan_hash", plan_hash},
              {"repeat", u.repeat},
              {"seed", seed},
              {"params", v.params},
              {"status", status},
              {"reason", reason},
              {"skip_key", skip_key}};
    write_json(meta_path, meta);
    outcome.ok = status == "ok";
  }

  runner::RunnerResult run_external(const Prepared& p, const Variant& v, const std::string& plan_name,
                                    std::size_t repeat, const TabularDataset& train,
                                    const std::optional<TabularDataset>& test, std::uint64_t seed) const {
    const fs::path work = fs::absolute(layout::work_dir(run_, p.config->id, v.id, plan_name));
    fs::create_directories(work);
    const std::string stem = std::to_string(repeat);
    const bool supervised = p.config->task != TaskKind::unsupervised;
    const std::string target_name = p.config->target.value_or("target");

    runner::RunnerManifest m;
    m.task = v.method->kind;
    m.train_path = work / (stem + ".train.csv");
    write_csv(supervised ? train : without_target(train), m.train_path, target_name);
    if (test) {
      m.test_path = work / (stem + ".test.csv");
      write_csv(*test, *m.test_path, target_name);
    }
    if (supervised) m.target_column = target_name;
    m.task_kind = p.config->task;
    if (p.config->task == TaskKind::classification) m.class_labels = p.data.class_names();
    if (v.method->kind == InterpretationKind::clustering) m.k_clusters = p.clusters;
    m.rank = v.rank;
    m.seed = seed;
    m.output_paths.interpretation = work / (stem + ".out.csv");
    if (test) m.output_paths.predictions = work / (stem + ".out.pred.csv");
    m.timeout_seconds = config_.timeout_seconds;
    m.params = v.params;

    runner::InvokeOptions o;
    o.log_dir = work;
    o.log_stem = stem;
    o.dims.n_features = train.n_features();
    o.dims.sample_ids = train.sample_ids();
    o.dims.k_clusters = m.k_clusters;
    o.dims.rank = v.rank;
    if (test) {
      o.predictions = runner::PredictionExpectation{test->sample_ids(), *test->target(),
                                                    p.config->task == TaskKind::classification,
                                                    p.data.class_names()};
    }
    try {
      return runner::invoke(v.method->command, m, o);
    } catch (const ValidationError& e) {
      runner::RunnerResult r;
      r.status = runner::RunStatus::crash;
      r.reason = e.what();
      return r;
    }
  }

  const PipelineConfig& config_;
  fs::path run_;
  const std::vector<Prepared>& data_;
  const std::vector<std::vector<Variant>>& variants_;
};

}  // namespace

PipelineSummary run_pipeline(const PipelineConfig& config, const PipelineOptions& options) {
  config.check_resources();
  const fs::path run = fs::absolute(options.output_dir.value_or(config.output_dir));
  const std::size_t workers = std::max<std::size_t>(1, options.workers.value_or(config.workers));
  fs::create_directories(run);
  spdlog::info("run directory {}", run.string());

  std::vector<Prepared> data;
  data.reserve(config.datasets.size());
  for (const auto& d : config.datasets) data.push_back(prepare_dataset(config, d));

  std::vector<std::vector<Variant>> variants;
  std::vector<Unit> units;
  for (std::size_t di = 0; di < data.size(); ++di) {
    const Prepared& p = data[di];
    write_dataset_files(run, p);
    for (const auto& [name, plan] : p.plans) write_json(layout::plan_file(run, p.config->id, name), plan.to_json(), -1);
    variants.push_back(expand_variants(config, p));
    for (std::size_t vi = 0; vi < variants.back().size(); ++vi) {
      for (std::size_t pi = 0; pi < p.plans.size(); ++pi) {
        for (std::size_t r = 0; r < p.plans[pi].second.repeats(); ++r) units.push_back({di, vi, pi, r});
      }
    }
  }
  write_json(layout::run_info(run), {{"version", std::string(kVersion)},
                                     {"config_hash", config.hash},
                                     {"seed", config.seed},
                                     {"standardize", config.standardize},
                                     {"metrics", metrics_to_json(config.metrics)}});

  spdlog::info("{} units on {} worker(s)", units.size(), workers);
  Executor exec(config, run, data, variants);
  std::vector<Outcome> outcomes(units.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) outcomes[i] = exec(units[i]);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(workers, units.size()); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  PipelineSummary summary{run, units.size(), 0, 0};
  for (const auto& o : outcomes) {
    if (o.fatal) std::rethrow_exception(o.fatal);
    summary.skipped += o.skipped;
    summary.failed += !o.ok;
  }
  spdlog::info("{} units: {} reused, {} failed", summary.units, summary.skipped, summary.failed);

  score_run(run, ScoreOptions{config.metrics, std::nullopt});
  write_report(run);
  return summary;
}

}  // namespace stabx::pipeline
