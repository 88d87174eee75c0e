#include "stabx/pipeline/score.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "stabx/core/csv.hpp"
#include "stabx/learners/hierarchical.hpp"
#include "stabx/metrics/neighbors.hpp"
#include "stabx/pipeline/pipeline.hpp"
#include "stabx/runner/parse.hpp"
#include "stabx/stability/prediction.hpp"
#include "stabx/stability/table.hpp"

namespace stabx::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using stability::MetricSpec;
using stability::StabilityTable;

nlohmann::json metrics_to_json(const MetricConfig& m) {
  return {{"rank", std::string(metrics::to_string(m.spec.rank))},
          {"k", m.spec.k},
          {"kendall_p", m.spec.kendall_p},
          {"partition", std::string(metrics::to_string(m.spec.partition))},
          {"nn_grid", m.spec.nn_grid},
          {"nn_sample_cap", m.spec.nn_sample_cap},
          {"nn_seed", m.spec.nn_seed},
          {"k_sweep", {m.k_sweep_min, m.k_sweep_max}},
          {"dr_ranks", m.dr_ranks}};
}

MetricConfig metrics_from_json(const nlohmann::json& doc) {
  MetricConfig m;
  m.spec.rank = metrics::parse_rank_metric(doc.at("rank").get<std::string>());
  m.spec.k = doc.at("k").get<std::size_t>();
  m.spec.kendall_p = doc.at("kendall_p").get<double>();
  m.spec.partition = metrics::parse_partition_metric(doc.at("partition").get<std::string>());
  m.spec.nn_grid = doc.at("nn_grid").get<std::size_t>();
  m.spec.nn_sample_cap = doc.at("nn_sample_cap").get<std::size_t>();
  m.spec.nn_seed = doc.at("nn_seed").get<std::uint64_t>();
  const auto sweep = doc.at("k_sweep").get<std::vector<std::size_t>>();
  if (sweep.size() != 2) throw ValidationError("k_sweep must have two entries");
  m.k_sweep_min = sweep[0];
  m.k_sweep_max = sweep[1];
  m.dr_ranks = doc.at("dr_ranks").get<std::vector<std::size_t>>();
  return m;
}

Interpretation load_artifact(const fs::path& path) {
  const auto kind = runner::sniff_interpretation(path);
  if (!kind) throw ValidationError(path.string() + ": header matches no artifact schema");
  const csv::Table t = csv::read_file(path);
  runner::ExpectedDims dims;
  dims.n_features = t.rows.size();
  for (const auto& r : t.rows) dims.sample_ids.push_back(r.fields[0]);
  if (*kind == InterpretationKind::clustering) {
    long long max_label = 0;
    for (const auto& r : t.rows) max_label = std::max(max_label, csv::parse_int(r.fields[1]).value_or(0));
    dims.k_clusters = static_cast<int>(max_label + 1);
  }
  if (*kind == InterpretationKind::dimension_reduction) dims.rank = t.header.size() - 1;
  try {
    return runner::parse_interpretation(path, *kind, dims);
  } catch (const runner::InvalidOutputError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

namespace {

struct DatasetMeta {
  std::string id;
  std::optional<TaskKind> task;
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  std::optional<int> clusters;
  std::vector<std::string> class_names;
  // Truth labels by sample id as class codes, or reals for regression.
  std::unordered_map<std::string, double> truth;
};

struct Cell {
  std::string dataset;
  std::string method;
  std::string plan;
  InterpretationKind kind = InterpretationKind::feature_importance;
  std::optional<double> sigma;
  std::vector<std::optional<InterpretationArtifact>> artifacts;
  std::vector<std::optional<PredictionSet>> predictions;
};

std::optional<json> read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// Orders method ids by name, then rank variants by numeric rank.
bool method_less(const std::string& a, const std::string& b) {
  const auto ra = split_rank_variant(a);
  const auto rb = split_rank_variant(b);
  const std::string ba = ra ? ra->first : a;
  const std::string bb = rb ? rb->first : b;
  if (ba != bb) return ba < bb;
  return (ra ? ra->second : 0) < (rb ? rb->second : 0);
}

std::vector<std::string> sorted_subdirs(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

DatasetMeta load_dataset_meta(const fs::path& run, const std::string& id) {
  DatasetMeta meta;
  meta.id = id;
  if (const auto info = read_json(layout::dataset_info(run, id))) {
    meta.task = parse_task_kind(info->at("task").get<std::string>());
    meta.n_samples = info->at("n_samples").get<std::size_t>();
    meta.n_features = info->at("n_features").get<std::size_t>();
    if (!info->at("clusters").is_null()) meta.clusters = info->at("clusters").get<int>();
    meta.class_names = info->at("class_names").get<std::vector<std::string>>();
  }
  const fs::path samples = layout::dataset_samples(run, id);
  if (fs::exists(samples)) {
    const csv::Table t = csv::read_file(samples);
    std::unordered_map<std::string, std::size_t> code;
    for (std::size_t c = 0; c < meta.class_names.size(); ++c) code.emplace(meta.class_names[c], c);
    for (const auto& r : t.rows) {
      if (meta.class_names.empty()) {
        meta.truth.emplace(r.fields[0], csv::parse_double(r.fields[1]).value_or(NAN));
      } else {
        auto it = code.find(r.fields[1]);
        if (it == code.end()) throw ValidationError(samples.string() + ": unknown label '" + r.fields[1] + "'");
        meta.truth.emplace(r.fields[0], static_cast<double>(it->second));
      }
    }
    if (!meta.clusters && !meta.class_names.empty()) meta.clusters = static_cast<int>(meta.class_names.size());
  }
  return meta;
}

std::optional<PredictionSet> load_predictions(const fs::path& path, const DatasetMeta& meta) {
  const csv::Table t = csv::read_file(path);
  if (t.header.size() != 3 || t.header[0] != "sample_id" || t.header[1] != "prediction" ||
      t.header[2] != "truth") {
    spdlog::warn("{}: predictions need 'sample_id,prediction,truth'; ignored", path.string());
    return std::nullopt;
  }
  const bool classification = meta.task == TaskKind::classification;
  std::unordered_map<std::string, std::size_t> code;
  for (std::size_t c = 0; c < meta.class_names.size(); ++c) code.emplace(meta.class_names[c], c);
  auto value = [&](const std::string& text) {
    if (classification) {
      auto it = code.find(text);
      if (it == code.end()) throw ValidationError(path.string() + ": unknown label '" + text + "'");
      return static_cast<double>(it->second);
    }
    const auto v = csv::parse_double(text);
    if (!v) throw ValidationError(path.string() + ": '" + text + "' is not a number");
    return *v;
  };
  PredictionSet p{{}, Eigen::VectorXd(static_cast<Eigen::Index>(t.rows.size())),
                  Eigen::VectorXd(static_cast<Eigen::Index>(t.rows.size())), classification};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    p.sample_ids.push_back(t.rows[i].fields[0]);
    p.values(static_cast<Eigen::Index>(i)) = value(t.rows[i].fields[1]);
    p.truth(static_cast<Eigen::Index>(i)) = value(t.rows[i].fields[2]);
  }
  p.validate();
  return p;
}

std::optional<std::size_t> repeat_index(const std::string& stem) {
  const auto v = csv::parse_int(stem);
  if (!v || *v < 0 || std::to_string(*v) != stem) return std::nullopt;
  return static_cast<std::size_t>(*v);
}

Cell load_cell(const fs::path& run, const fs::path& dir, const std::string& dataset,
               const std::string& method, const std::string& plan, const DatasetMeta& meta) {
  Cell cell{dataset, method, plan, InterpretationKind::feature_importance, std::nullopt, {}, {}};
  std::map<std::size_t, fs::path> artifacts;
  std::map<std::size_t, fs::path> preds;
  std::map<std::size_t, json> metas;
  std::size_t total = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    std::optional<std::size_t> r;
    if (name.size() > 9 && name.ends_with(".pred.csv")) {
      if ((r = repeat_index(name.substr(0, name.size() - 9)))) preds[*r] = e.path();
    } else if (name.ends_with(".csv")) {
      if ((r = repeat_index(name.substr(0, name.size() - 4)))) artifacts[*r] = e.path();
    } else if (name.ends_with(".json")) {
      if ((r = repeat_index(name.substr(0, name.size() - 5)))) metas[*r] = *read_json(e.path());
    }
    if (r) {
      total = std::max(total, *r + 1);
    } else {
      spdlog::warn("{}: not a repeat file; ignored", e.path().string());
    }
  }
  std::string plan_hash = plan;
  if (const auto doc = read_json(layout::plan_file(run, dataset, plan))) {
    const auto p = perturb::PerturbationPlan::from_json(*doc);
    total = std::max(total, p.repeats());
    plan_hash = p.hash();
    if (p.kind == perturb::PlanKind::noise) cell.sigma = p.sigma;
  } else if (plan.starts_with("noise_")) {
    cell.sigma = csv::parse_double(std::string_view(plan).substr(6));
  }
  cell.artifacts.resize(total);
  cell.predictions.resize(total);

  std::optional<InterpretationKind> kind;
  for (const auto& [r, path] : artifacts) {
    const auto k = runner::sniff_interpretation(path);
    if (!k) throw ValidationError(path.string() + ": header matches no artifact schema");
    if (kind && *kind != *k) {
      throw ValidationError("mixed artifact kinds in " + dataset + "/" + method + "/" + plan + ": " +
                            std::string(to_string(*kind)) + " and " + std::string(to_string(*k)));
    }
    kind = k;
    InterpretationArtifact a{method, r, 0, plan_hash, load_artifact(path)};
    if (auto it = metas.find(r); it != metas.end()) {
      if (it->second.value("status", "ok") != "ok") continue;
      a.seed = it->second.value("seed", std::uint64_t{0});
      a.plan_hash = it->second.value("plan_hash", plan_hash);
    }
    cell.artifacts[r] = std::move(a);
    if (auto it = preds.find(r); it != preds.end()) cell.predictions[r] = load_predictions(it->second, meta);
  }
  if (!kind) {
    for (const auto& [r, m] : metas) {
      if (m.contains("kind")) kind = parse_interpretation_kind(m.at("kind").get<std::string>());
    }
  }
  if (!kind) throw ValidationError(dir.string() + ": no artifacts and no recorded kind");
  cell.kind = *kind;
  return cell;
}

std::size_t ok_count(const std::vector<std::optional<InterpretationArtifact>>& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](const auto& a) { return a.has_value(); }));
}

bool too_many_failures(std::size_t ok, std::size_t total) {
  return static_cast<double>(total - ok) > stability::kMaxFailureFraction * static_cast<double>(total);
}

json number_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json sweep_row(const std::string& method, const std::string& dataset, double x,
               const std::optional<double>& y, std::size_t pairs) {
  return {{"method", method}, {"dataset", dataset}, {"x", x}, {"y", number_or_null(y)}, {"n_pairs", pairs}};
}

class Scorer {
 public:
  Scorer(const fs::path& run, MetricConfig metrics) : run_(run), metrics_(std::move(metrics)) {}

  json score() {
    load();
    json out;
    out["metrics"] = metrics_to_json(metrics_);
    out["datasets"] = json::array();
    for (const auto& [id, meta] : meta_) {
      out["datasets"].push_back({{"id", id},
                                 {"n_samples", meta.n_samples},
                                 {"n_features", meta.n_features},
                                 {"task", meta.task ? json(std::string(to_string(*meta.task))) : json(nullptr)}});
    }
    out["within"] = json::object();
    out["accuracy"] = json::object();
    out["between"] = json::object();
    for (auto kind : {InterpretationKind::feature_importance, InterpretationKind::clustering,
                      InterpretationKind::dimension_reduction}) {
      const auto methods = methods_of(kind);
      if (methods.empty()) continue;
      const std::string key(to_string(kind));
      out["within"][key] = within_table(kind, methods).to_json();
      out["accuracy"][key] = accuracy_table(kind, methods).to_json();
      out["between"][key] = between_rows(kind, methods);
    }
    out["prediction_stability"] = prediction_stability_rows();
    out["between_prediction"] = between_prediction_rows();
    out["sweeps"] = {{"k_ao", k_sweep(metrics::RankMetric::ao)},
                     {"k_jaccard", k_sweep(metrics::RankMetric::jaccard)},
                     {"k_kendall", k_sweep(metrics::RankMetric::kendall)},
                     {"sigma", sigma_sweep()},
                     {"nn", nn_sweep()},
                     {"rank", rank_sweep()}};
    return out;
  }

 private:
  void load() {
    const fs::path root = run_ / "artifacts";
    if (!fs::is_directory(root)) throw ValidationError("no artifacts directory in " + run_.string());
    for (const auto& dataset : sorted_subdirs(root)) {
      DatasetMeta meta = load_dataset_meta(run_, dataset);
      for (const auto& method : sorted_subdirs(root / dataset)) {
        const fs::path mdir = root / dataset / method;
        bool flat = false;
        for (const auto& e : fs::directory_iterator(mdir)) flat |= e.is_regular_file();
        if (flat) cells_.push_back(load_cell(run_, mdir, dataset, method, "default", meta));
        for (const auto& plan : sorted_subdirs(mdir)) {
          cells_.push_back(load_cell(run_, mdir / plan, dataset, method, plan, meta));
        }
      }
      meta_.emplace(dataset, std::move(meta));
    }
    if (cells_.empty()) throw ValidationError("no artifacts found under " + root.string());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const Cell& c = cells_[i];
      if (c.sigma) continue;
      const auto key = std::make_pair(c.dataset, c.method);
      if (base_.count(key)) {
        throw ValidationError(c.dataset + "/" + c.method + " has several non-noise plans: " +
                              cells_[base_[key]].plan + " and " + c.plan);
      }
      base_[key] = i;
    }
    for (const auto& [key, i] : base_) {
      for (const Cell& c : cells_) {
        if (c.dataset == key.first && c.method == key.second && c.kind != cells_[i].kind) {
          throw ValidationError("mixed artifact kinds for " + key.first + "/" + key.second);
        }
      }
    }
  }

  std::vector<std::string> datasets() const {
    std::vector<std::string> out;
    for (const auto& [id, meta] : meta_) out.push_back(id);
    return out;
  }

  // Datasets with at least one cell of `kind`.
  std::vector<std::string> datasets_of(InterpretationKind kind) const {
    std::set<std::string> seen;
    for (const auto& c : cells_) {
      if (c.kind == kind) seen.insert(c.dataset);
    }
    return {seen.begin(), seen.end()};
  }

  std::vector<std::string> methods_of(InterpretationKind kind) const {
    std::set<std::string> seen;
    for (const auto& c : cells_) {
      if (c.kind == kind) seen.insert(c.method);
    }
    std::vector<std::string> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), method_less);
    return out;
  }

  const Cell* base_cell(const std::string& dataset, const std::string& method) const {
    auto it = base_.find({dataset, method});
    return it == base_.end() ? nullptr : &cells_[it->second];
  }

  MetricSpec spec() const { return metrics_.spec; }

  StabilityTable within_table(InterpretationKind kind, const std::vector<std::string>& methods) const {
    const auto ds = datasets_of(kind);
    StabilityTable t(ds, methods);
    const std::string metric = stability::metric_name(kind, spec());
    for (std::size_t d = 0; d < ds.size(); ++d) {
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const Cell* c = base_cell(ds[d], methods[m]);
        if (!c) {
          t.at(d, m).metric = metric;
          t.at(d, m).note = "not run";
          continue;
        }
        t.at(d, m) = stability::make_cell(stability::within_method(c->artifacts, spec()), metric);
      }
    }
    return t;
  }

  // Accuracy of one successful repeat, if it can be computed.
  std::optional<double> repeat_accuracy(const Cell& c, std::size_t r, const DatasetMeta& meta) const {
    if (c.kind == InterpretationKind::feature_importance) {
      const auto& p = c.predictions[r];
      if (!p) return std::nullopt;
      return p->classification ? stability::accuracy_classification(*p) : stability::accuracy_regression(*p);
    }
    if (meta.truth.empty() || !meta.clusters) return std::nullopt;
    const Interpretation& v = c.artifacts[r]->value;
    ClusterLabeling labels;
    if (const auto* cl = std::get_if<ClusterLabeling>(&v)) {
      labels = *cl;
    } else {
      const auto& e = std::get<Embedding>(v);
      if (static_cast<std::size_t>(*meta.clusters) > e.sample_ids.size()) return std::nullopt;
      labels = ClusterLabeling{e.sample_ids,
                               learners::hierarchical_labels(e.coords, *meta.clusters, learners::Linkage::ward,
                                                             learners::Distance::euclidean),
                               *meta.clusters};
    }
    ClusterLabeling truth{{}, {}, static_cast<int>(std::max<std::size_t>(1, meta.class_names.size()))};
    for (const auto& id : labels.sample_ids) {
      auto it = meta.truth.find(id);
      if (it == meta.truth.end()) return std::nullopt;
      truth.sample_ids.push_back(id);
      truth.labels.push_back(static_cast<int>(it->second));
    }
    return stability::accuracy_clustering(labels, truth, metrics_.spec.partition);
  }

  std::string accuracy_metric(InterpretationKind kind, const DatasetMeta& meta) const {
    const std::string part(metrics::to_string(metrics_.spec.partition));
    switch (kind) {
      case InterpretationKind::feature_importance:
        return meta.task == TaskKind::classification ? "accuracy" : "exp_neg_mse";
      case InterpretationKind::clustering:
        return part;
      case InterpretationKind::dimension_reduction:
        return part + "_ward";
    }
    return part;
  }

  StabilityTable accuracy_table(InterpretationKind kind, const std::vector<std::string>& methods) const {
    const auto ds = datasets_of(kind);
    StabilityTable t(ds, methods);
    for (std::size_t d = 0; d < ds.size(); ++d) {
      const DatasetMeta& meta = meta_.at(ds[d]);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        stability::TableCell& cell = t.at(d, m);
        cell.metric = accuracy_metric(kind, meta);
        const Cell* c = base_cell(ds[d], methods[m]);
        if (!c) {
          cell.note = "not run";
          continue;
        }
        cell.repeats_total = c->artifacts.size();
        cell.repeats_ok = ok_count(c->artifacts);
        if (too_many_failures(cell.repeats_ok, cell.repeats_total)) {
          cell.note = "missing: " + std::to_string(cell.repeats_total - cell.repeats_ok) + " of " +
                      std::to_string(cell.repeats_total) + " repeats failed";
          continue;
        }
        std::vector<double> values;
        for (std::size_t r = 0; r < c->artifacts.size(); ++r) {
          if (!c->artifacts[r]) continue;
          if (const auto a = repeat_accuracy(*c, r, meta)) values.push_back(*a);
        }
        if (values.empty()) {
          cell.note = "missing: no ground truth";
          continue;
        }
        cell.value = stability::ordered_mean(std::move(values));
      }
    }
    return t;
  }

  json between_rows(InterpretationKind kind, const std::vector<std::string>& methods) const {
    json rows = json::array();
    const std::string metric = stability::metric_name(kind, spec());
    for (const auto& d : datasets_of(kind)) {
      std::vector<const Cell*> cells;
      for (const auto& m : methods) {
        if (const Cell* c = base_cell(d, m)) cells.push_back(c);
      }
      std::vector<std::vector<stability::PairwiseSummary>> s(cells.size(),
                                                             std::vector<stability::PairwiseSummary>(cells.size()));
      for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i; j < cells.size(); ++j) {
          if (cells[i]->plan != cells[j]->plan || cells[i]->artifacts.size() != cells[j]->artifacts.size()) {
            s[i][j].note = "missing: different plans";
          } else {
            s[i][j] = stability::between_method(cells[i]->artifacts, cells[j]->artifacts, spec());
          }
          s[j][i] = s[i][j];
        }
      }
      for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
          rows.push_back({{"dataset", d},
                          {"method_a", cells[i]->method},
                          {"method_b", cells[j]->method},
                          {"metric", metric},
                          {"value", number_or_null(s[i][j].mean)},
                          {"pairs", s[i][j].pairs},
                          {"note", s[i][j].note}});
        }
      }
    }
    return rows;
  }

  std::vector<const Cell*> prediction_cells(const std::string& dataset) const {
    std::vector<const Cell*> out;
    for (const auto& m : methods_of(InterpretationKind::feature_importance)) {
      const Cell* c = base_cell(dataset, m);
      if (!c) continue;
      if (std::any_of(c->predictions.begin(), c->predictions.end(), [](const auto& p) { return p.has_value(); })) {
        out.push_back(c);
      }
    }
    return out;
  }

  json prediction_stability_rows() const {
    json rows = json::array();
    for (const auto& d : datasets()) {
      for (const Cell* c : prediction_cells(d)) {
        std::vector<PredictionSet> sets;
        for (const auto& p : c->predictions) {
          if (p) sets.push_back(*p);
        }
        const std::size_t ok = ok_count(c->artifacts);
        const bool classification = sets.front().classification;
        json row{{"dataset", d},
                 {"method", c->method},
                 {"measure", classification ? "exp_neg_entropy" : "exp_neg_sd"},
                 {"repeats_ok", ok},
                 {"repeats_total", c->artifacts.size()}};
        if (too_many_failures(ok, c->artifacts.size())) {
          row.update({{"value", nullptr}, {"n_samples", 0}, {"excluded", 0}});
        } else {
          const auto ps = stability::prediction_stability(sets);
          row.update({{"value", number_or_null(ps.mean)}, {"n_samples", ps.sample_ids.size()},
                      {"excluded", ps.excluded}});
        }
        rows.push_back(row);
      }
    }
    return rows;
  }

  json between_prediction_rows() const {
    json rows = json::array();
    for (const auto& d : datasets()) {
      const auto cells = prediction_cells(d);
      if (cells.empty()) continue;
      const bool classification = meta_.at(d).task == TaskKind::classification;
      if (classification) {
        for (const Cell* a : cells) {
          for (const Cell* b : cells) {
            std::optional<double> v;
            if (a->predictions.size() == b->predictions.size()) {
              v = stability::between_prediction_classification(a->predictions, b->predictions);
            }
            rows.push_back({{"dataset", d}, {"method_a", a->method}, {"method_b", b->method},
                            {"measure", "label_agreement"}, {"value", number_or_null(v)}});
          }
        }
        continue;
      }
      std::vector<std::vector<std::optional<PredictionSet>>> preds;
      std::size_t repeats = cells.front()->predictions.size();
      for (const Cell* c : cells) {
        preds.push_back(c->predictions);
        repeats = std::max(repeats, c->predictions.size());
      }
      for (auto& p : preds) p.resize(repeats);
      const auto agreement = stability::between_prediction_regression(preds);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
          const double v = agreement.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          rows.push_back({{"dataset", d}, {"method_a", cells[i]->method}, {"method_b", cells[j]->method},
                          {"measure", "mse_agreement"},
                          {"value", std::isnan(v) ? json(nullptr) : json(v)}});
        }
      }
    }
    return rows;
  }

  json k_sweep(metrics::RankMetric metric) const {
    json rows = json::array();
    for (const auto& m : methods_of(InterpretationKind::feature_importance)) {
      for (const auto& d : datasets()) {
        const Cell* c = base_cell(d, m);
        if (!c) continue;
        std::size_t p = meta_.at(d).n_features;
        for (const auto& a : c->artifacts) {
          if (a) p = std::get<FeatureRanking>(a->value).size();
        }
        MetricSpec s = spec();
        s.rank = metric;
        for (std::size_t k = metrics_.k_sweep_min; k <= std::min(metrics_.k_sweep_max, p); ++k) {
          s.k = k;
          const auto summary = stability::within_method(c->artifacts, s);
          rows.push_back(sweep_row(m, d, static_cast<double>(k), summary.mean, summary.pairs));
        }
      }
    }
    return rows;
  }

  json sigma_sweep() const {
    json rows = json::array();
    std::vector<const Cell*> noisy;
    for (const auto& c : cells_) {
      if (c.sigma) noisy.push_back(&c);
    }
    std::sort(noisy.begin(), noisy.end(), [](const Cell* a, const Cell* b) {
      if (a->method != b->method) return method_less(a->method, b->method);
      if (a->dataset != b->dataset) return a->dataset < b->dataset;
      return *a->sigma < *b->sigma;
    });
    for (const Cell* c : noisy) {
      const auto summary = stability::within_method(c->artifacts, spec());
      rows.push_back(sweep_row(c->method, c->dataset, *c->sigma, summary.mean, summary.pairs));
    }
    return rows;
  }

  json nn_sweep() const {
    json rows = json::array();
    for (const auto& m : methods_of(InterpretationKind::dimension_reduction)) {
      for (const auto& d : datasets()) {
        const Cell* c = base_cell(d, m);
        if (!c || too_many_failures(ok_count(c->artifacts), c->artifacts.size())) continue;
        std::vector<std::pair<Embedding, Embedding>> pairs;
        std::size_t n_min = 0;
        for (std::size_t i = 0; i < c->artifacts.size(); ++i) {
          if (!c->artifacts[i]) continue;
          for (std::size_t j = i + 1; j < c->artifacts.size(); ++j) {
            if (!c->artifacts[j]) continue;
            auto [a, b] = stability::align_on_common(c->artifacts[i]->value, c->artifacts[j]->value);
            auto& ea = std::get<Embedding>(a);
            if (ea.sample_ids.size() < 2) continue;
            n_min = pairs.empty() ? ea.sample_ids.size() : std::min(n_min, ea.sample_ids.size());
            pairs.emplace_back(std::move(ea), std::move(std::get<Embedding>(b)));
          }
        }
        if (pairs.empty()) continue;
        const auto ks = metrics::nn_k_grid(n_min, spec().nn_grid);
        std::vector<std::vector<double>> by_k(ks.size());
        for (const auto& [a, b] : pairs) {
          const auto s = metrics::nn_jaccard_sweep(a, b, ks, spec().nn_sample_cap, spec().nn_seed);
          for (std::size_t g = 0; g < ks.size(); ++g) by_k[g].push_back(s[g]);
        }
        for (std::size_t g = 0; g < ks.size(); ++g) {
          rows.push_back(sweep_row(m, d, static_cast<double>(ks[g]), stability::ordered_mean(by_k[g]),
                                   by_k[g].size()));
        }
      }
    }
    return rows;
  }

  json rank_sweep() const {
    json rows = json::array();
    std::map<std::string, std::vector<std::pair<std::size_t, std::string>>> by_base;
    for (const auto& m : methods_of(InterpretationKind::dimension_reduction)) {
      if (const auto split = split_rank_variant(m)) by_base[split->first].emplace_back(split->second, m);
    }
    for (const auto& [base, variants] : by_base) {
      for (const auto& d : datasets()) {
        for (const auto& [rank, variant] : variants) {
          const Cell* c = base_cell(d, variant);
          if (!c) continue;
          const auto summary = stability::within_method(c->artifacts, spec());
          rows.push_back(sweep_row(base, d, static_cast<double>(rank), summary.mean, summary.pairs));
        }
      }
    }
    return rows;
  }

  fs::path run_;
  MetricConfig metrics_;
  std::map<std::string, DatasetMeta> meta_;
  std::vector<Cell> cells_;
  std::map<std::pair<std::string, std::string>, std::size_t> base_;
};

}  // namespace

nlohmann::json score_run(const fs::path& run_dir, const ScoreOptions& options) {
  MetricConfig metrics;
  if (options.metrics) {
    metrics = *options.metrics;
  } else if (const auto info = read_json(layout::run_info(run_dir)); info && info->contains("metrics")) {
    metrics = metrics_from_json(info->at("metrics"));
  }
  Scorer scorer(run_dir, metrics);
  const json scores = scorer.score();

  const fs::path out = options.out_dir.value_or(run_dir / "scores");
  fs::create_directories(out);
  {
    std::ofstream f(out / "scores.json", std::ios::binary);
    f << scores.dump(1) << '\n';
    if (!f) throw Error("failed writing " + (out / "scores.json").string());
  }
  for (const char* group : {"within", "accuracy"}) {
    for (const auto& [kind, table] : scores.at(group).items()) {
      std::ofstream f(out / (std::string(group) + "_" + kind + ".csv"), std::ios::binary);
      StabilityTable::from_json(table).write_csv(f);
    }
  }
  spdlog::info("scores written to {}", out.string());
  return scores;
}

}  // namespace stabx::pipeline
