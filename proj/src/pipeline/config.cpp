#include "stabx/pipeline/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "stabx/core/csv.hpp"
#include "stabx/core/dataset.hpp"
#include "stabx/core/random.hpp"
#include "stabx/pipeline/builtins.hpp"
#include "stabx/runner/invoke.hpp"

namespace stabx::pipeline {
namespace {

using nlohmann::json;

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid config (" + std::to_string(problems.size()) + " problem" +
                    (problems.size() == 1 ? "" : "s") + ")";
  for (const auto& p : problems) out += "\n  - " + p;
  return out;
}

// Reads typed fields from one JSON object and records problems instead of
// throwing, so a single pass reports everything.
class Fields {
 public:
  Fields(const json& obj, std::string where, std::vector<std::string>& problems,
         std::set<std::string> allowed)
      : obj_(obj), where_(std::move(where)), problems_(problems) {
    if (!obj.is_object()) {
      fail("must be an object");
      return;
    }
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) fail("unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return obj_.is_object() && obj_.contains(key); }

  template <typename T>
  std::optional<T> get(const char* key) {
    if (!has(key)) return std::nullopt;
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(std::string("'") + key + "' has the wrong type");
      return std::nullopt;
    }
  }

  template <typename T>
  std::optional<T> required(const char* key) {
    if (!has(key)) {
      fail(std::string("missing '") + key + "'");
      return std::nullopt;
    }
    return get<T>(key);
  }

  void fail(const std::string& what) { problems_.push_back(where_ + ": " + what); }
  const std::string& where() const { return where_; }

 private:
  const json& obj_;
  std::string where_;
  std::vector<std::string>& problems_;
};

std::optional<std::size_t> positive(Fields& f, const char* key) {
  auto v = f.get<long long>(key);
  if (!v) return std::nullopt;
  if (*v < 1) {
    f.fail(std::string("'") + key + "' must be >= 1");
    return std::nullopt;
  }
  return static_cast<std::size_t>(*v);
}

std::optional<double> fraction(Fields& f, const char* key) {
  auto v = f.get<double>(key);
  if (v && !(*v > 0.0 && *v < 1.0)) {
    f.fail(std::string("'") + key + "' must lie in (0, 1)");
    return std::nullopt;
  }
  return v;
}

DatasetConfig parse_dataset(const json& doc, std::size_t index, const std::filesystem::path& base,
                            std::vector<std::string>& problems) {
  Fields f(doc, "datasets[" + std::to_string(index) + "]", problems,
           {"id", "path", "task", "target", "truth", "clusters", "id_column"});
  DatasetConfig d;
  if (auto v = f.required<std::string>("id")) d.id = *v;
  if (auto v = f.required<std::string>("path")) {
    d.path = std::filesystem::path(*v).is_absolute() ? std::filesystem::path(*v) : base / *v;
  }
  if (auto v = f.required<std::string>("task")) {
    try {
      d.task = parse_task_kind(*v);
    } catch (const ValidationError& e) {
      f.fail(e.what());
    }
  }
  d.target = f.get<std::string>("target");
  d.truth = f.get<std::string>("truth");
  if (auto v = f.get<long long>("clusters")) {
    if (*v < 1) {
      f.fail("'clusters' must be >= 1");
    } else {
      d.clusters = static_cast<int>(*v);
    }
  }
  if (auto v = f.get<std::string>("id_column")) d.id_column = *v;
  if (d.task != TaskKind::unsupervised && !d.target) f.fail("supervised dataset needs 'target'");
  if (d.task != TaskKind::unsupervised && d.truth) f.fail("'truth' is for unsupervised datasets");
  if (d.task == TaskKind::unsupervised && d.target) {
    f.fail("unsupervised dataset takes 'truth', not 'target'");
  }
  return d;
}

MethodConfig parse_method(const json& doc, std::size_t index, std::vector<std::string>& problems) {
  Fields f(doc, "methods[" + std::to_string(index) + "]", problems,
           {"id", "builtin", "command", "task", "params", "datasets"});
  MethodConfig m;
  if (auto v = f.required<std::string>("id")) m.id = *v;
  if (m.id.find_first_of("/@\\") != std::string::npos || m.id == "." || m.id == "..") {
    f.fail("method id '" + m.id + "' may not contain '/', '\\' or '@'");
  }
  m.builtin = f.get<std::string>("builtin");
  if (auto v = f.get<std::vector<std::string>>("command")) m.command = *v;
  if (auto v = f.get<json>("params")) {
    if (!v->is_object()) {
      f.fail("'params' must be an object");
    } else {
      m.params = *v;
    }
  }
  if (auto v = f.get<std::vector<std::string>>("datasets")) m.datasets = *v;
  const auto task = f.get<std::string>("task");
  if (m.builtin && f.has("command")) f.fail("give either 'builtin' or 'command', not both");
  if (m.builtin) {
    if (auto kind = builtin_kind(*m.builtin)) {
      m.kind = *kind;
      for (const auto& p : check_builtin_params(*m.builtin, m.params)) f.fail(p);
    } else {
      f.fail("unknown built-in method '" + *m.builtin + "'");
    }
    if (task) f.fail("'task' is implied by the built-in");
  } else if (f.has("command")) {
    if (m.command.empty()) f.fail("'command' must not be empty");
    if (!task) {
      f.fail("runner methods need 'task'");
    } else {
      try {
        m.kind = parse_interpretation_kind(*task);
      } catch (const ValidationError& e) {
        f.fail(e.what());
      }
    }
  } else {
    f.fail("needs 'builtin' or 'command'");
  }
  return m;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ValidationError(join_problems(problems)), problems_(std::move(problems)) {}

PipelineConfig PipelineConfig::from_json(const json& doc, const std::filesystem::path& base_dir) {
  std::vector<std::string> problems;
  PipelineConfig c;
  Fields top(doc, "config", problems,
             {"output_dir", "seed", "workers", "standardize", "timeout_seconds", "datasets",
              "methods", "perturbation", "metrics"});
  if (!doc.is_object()) throw ConfigError(problems);

  const std::string out = top.get<std::string>("output_dir").value_or("run");
  c.output_dir = std::filesystem::path(out).is_absolute() ? std::filesystem::path(out) : base_dir / out;
  if (auto v = top.get<unsigned long long>("seed")) c.seed = *v;
  if (auto v = positive(top, "workers")) c.workers = *v;
  if (auto v = top.get<bool>("standardize")) c.standardize = *v;
  if (auto v = positive(top, "timeout_seconds")) c.timeout_seconds = static_cast<std::int64_t>(*v);

  if (auto ds = top.required<json>("datasets")) {
    if (!ds->is_array() || ds->empty()) {
      top.fail("'datasets' must be a non-empty array");
    } else {
      for (std::size_t i = 0; i < ds->size(); ++i) c.datasets.push_back(parse_dataset((*ds)[i], i, base_dir, problems));
    }
  }
  if (auto ms = top.required<json>("methods")) {
    if (!ms->is_array() || ms->empty()) {
      top.fail("'methods' must be a non-empty array");
    } else {
      for (std::size_t i = 0; i < ms->size(); ++i) c.methods.push_back(parse_method((*ms)[i], i, problems));
    }
  }

  if (auto pj = top.get<json>("perturbation")) {
    Fields f(*pj, "perturbation", problems, {"split_ratio", "subsample_fraction", "repeats", "noise"});
    if (auto v = fraction(f, "split_ratio")) c.perturbation.split_ratio = *v;
    if (auto v = fraction(f, "subsample_fraction")) c.perturbation.subsample_fraction = *v;
    if (auto v = positive(f, "repeats")) c.perturbation.repeats = *v;
    if (auto nj = f.get<json>("noise")) {
      Fields n(*nj, "perturbation.noise", problems, {"distribution", "sigmas", "repeats"});
      NoiseConfig noise;
      if (auto v = n.get<std::string>("distribution")) {
        try {
          noise.distribution = perturb::parse_distribution(*v);
        } catch (const ValidationError& e) {
          n.fail(e.what());
        }
      }
      if (auto v = n.required<std::vector<double>>("sigmas")) {
        noise.sigmas = *v;
        if (noise.sigmas.empty()) n.fail("'sigmas' must not be empty");
        for (double s : noise.sigmas) {
          if (!(s >= 0.0) || !std::isfinite(s)) n.fail("sigmas must be finite and >= 0");
        }
        std::vector<double> sorted = noise.sigmas;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) n.fail("duplicate sigma");
      }
      if (auto v = positive(n, "repeats")) noise.repeats = *v;
      c.perturbation.noise = noise;
    }
  }
  if (c.perturbation.repeats < 2) problems.push_back("perturbation: 'repeats' must be >= 2");

  if (auto mj = top.get<json>("metrics")) {
    Fields f(*mj, "metrics", problems,
             {"rank", "k", "k_sweep", "kendall_p", "partition", "nn_grid", "nn_sample_cap", "nn_seed",
              "dr_ranks"});
    auto& s = c.metrics.spec;
    try {
      if (auto v = f.get<std::string>("rank")) s.rank = metrics::parse_rank_metric(*v);
    } catch (const ValidationError& e) {
      f.fail(e.what());
    }
    try {
      if (auto v = f.get<std::string>("partition")) s.partition = metrics::parse_partition_metric(*v);
    } catch (const ValidationError& e) {
      f.fail(e.what());
    }
    if (auto v = positive(f, "k")) s.k = *v;
    if (auto v = f.get<double>("kendall_p")) {
      if (*v < 0.0 || *v > 1.0) {
        f.fail("'kendall_p' must lie in [0, 1]");
      } else {
        s.kendall_p = *v;
      }
    }
    if (auto v = f.get<std::vector<long long>>("k_sweep")) {
      if (v->size() != 2 || (*v)[0] < 1 || (*v)[1] < (*v)[0]) {
        f.fail("'k_sweep' must be [min, max] with 1 <= min <= max");
      } else {
        c.metrics.k_sweep_min = static_cast<std::size_t>((*v)[0]);
        c.metrics.k_sweep_max = static_cast<std::size_t>((*v)[1]);
      }
    }
    if (auto v = f.get<long long>("nn_grid")) {
      if (*v < 2) {
        f.fail("'nn_grid' must be >= 2");
      } else {
        s.nn_grid = static_cast<std::size_t>(*v);
      }
    }
    if (auto v = f.get<long long>("nn_sample_cap")) {
      if (*v < 2) {
        f.fail("'nn_sample_cap' must be >= 2");
      } else {
        s.nn_sample_cap = static_cast<std::size_t>(*v);
      }
    }
    if (auto v = f.get<unsigned long long>("nn_seed")) s.nn_seed = *v;
    if (auto v = f.get<std::vector<long long>>("dr_ranks")) {
      c.metrics.dr_ranks.clear();
      for (long long r : *v) {
        if (r < 1) {
          f.fail("'dr_ranks' entries must be >= 1");
        } else {
          c.metrics.dr_ranks.push_back(static_cast<std::size_t>(r));
        }
      }
      std::sort(c.metrics.dr_ranks.begin(), c.metrics.dr_ranks.end());
      c.metrics.dr_ranks.erase(std::unique(c.metrics.dr_ranks.begin(), c.metrics.dr_ranks.end()),
                               c.metrics.dr_ranks.end());
      if (c.metrics.dr_ranks.empty()) f.fail("'dr_ranks' must not be empty");
    }
  }

  std::set<std::string> dataset_ids;
  for (const auto& d : c.datasets) {
    if (!d.id.empty() && !dataset_ids.insert(d.id).second) problems.push_back("duplicate dataset id '" + d.id + "'");
    if (d.id.find_first_of("/\\") != std::string::npos) {
      problems.push_back("dataset id '" + d.id + "' may not contain path separators");
    }
  }
  std::set<std::string> method_ids;
  for (const auto& m : c.methods) {
    if (!m.id.empty() && !method_ids.insert(m.id).second) problems.push_back("duplicate method id '" + m.id + "'");
    for (const auto& ref : m.datasets) {
      if (!dataset_ids.count(ref)) {
        problems.push_back("method '" + m.id + "' references unknown dataset '" + ref + "'");
      }
    }
  }
  if (!problems.empty()) throw ConfigError(problems);

  json hashed = doc;
  hashed.erase("output_dir");
  hashed.erase("workers");
  c.hash = hex64(fnv1a64(hashed.dump()));
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return from_json(doc, std::filesystem::absolute(path).parent_path());
}

bool PipelineConfig::applies(const MethodConfig& method, const DatasetConfig& dataset) const {
  if (!method.datasets.empty() &&
      std::find(method.datasets.begin(), method.datasets.end(), dataset.id) == method.datasets.end()) {
    return false;
  }
  const bool supervised = dataset.task != TaskKind::unsupervised;
  return supervised == (method.kind == InterpretationKind::feature_importance);
}

void PipelineConfig::check_resources() const {
  std::vector<std::string> problems;
  for (const auto& d : datasets) {
    const std::string where = "dataset '" + d.id + "'";
    if (!std::filesystem::is_regular_file(d.path)) {
      problems.push_back(where + ": file " + d.path.string() + " not found");
      continue;
    }
    std::optional<TabularDataset> data;
    try {
      data = load_csv(d.path, LoadOptions{d.task == TaskKind::unsupervised ? d.truth : d.target,
                                          d.task, d.id_column, {}});
    } catch (const Error& e) {
      problems.push_back(where + ": " + e.what());
      continue;
    }
    if (data->task_kind() == TaskKind::classification && data->num_classes() < 2) {
      problems.push_back(where + ": classification target has fewer than 2 classes");
    }
    bool clustering = false;
    for (const auto& m : methods) {
      if (!applies(m, d)) continue;
      clustering |= m.kind == InterpretationKind::clustering;
    }
    if (clustering && !d.clusters && !d.truth) {
      problems.push_back(where + ": clustering methods need 'clusters' or a 'truth' column");
    }
    const std::size_t k = d.clusters ? static_cast<std::size_t>(*d.clusters) : data->num_classes();
    if (clustering && k > data->n_samples()) {
      problems.push_back(where + ": more clusters than samples");
    }
  }
  for (const auto& m : methods) {
    if (!m.command.empty() && !runner::command_exists(m.command.front())) {
      problems.push_back("method '" + m.id + "': runner command '" + m.command.front() +
                         "' is not an executable");
    }
    bool used = false;
    for (const auto& d : datasets) used |= applies(m, d);
    if (!used) problems.push_back("method '" + m.id + "' applies to no dataset");
  }
  if (!problems.empty()) throw ConfigError(problems);
}

}  // namespace stabx::pipeline
