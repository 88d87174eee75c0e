#include "stabx/runner/manifest.hpp"

#include <fstream>

#include "stabx/core/errors.hpp"

namespace stabx::runner {
namespace {

void require_absolute(const std::filesystem::path& p, const char* field) {
  if (p.empty() || !p.is_absolute()) {
    throw ValidationError(std::string("manifest field '") + field + "' must be an absolute path");
  }
}

}  // namespace

void RunnerManifest::validate() const {
  require_absolute(train_path, "train_path");
  if (test_path) require_absolute(*test_path, "test_path");
  require_absolute(output_paths.interpretation, "output_paths.interpretation");
  if (output_paths.predictions) {
    require_absolute(*output_paths.predictions, "output_paths.predictions");
    if (!test_path) throw ValidationError("manifest requests predictions without a test_path");
  }
  if (timeout_seconds <= 0) throw ValidationError("manifest timeout_seconds must be positive");
  switch (task) {
    case InterpretationKind::clustering:
      if (!k_clusters || *k_clusters < 1) {
        throw ValidationError("clustering manifest needs k_clusters >= 1");
      }
      break;
    case InterpretationKind::dimension_reduction:
      if (!rank || *rank < 1) throw ValidationError("dimension_reduction manifest needs rank >= 1");
      break;
    case InterpretationKind::feature_importance:
      if (!target_column) throw ValidationError("feature_importance manifest needs target_column");
      break;
  }
  if (task_kind == TaskKind::classification && class_labels.size() < 2) {
    throw ValidationError("classification manifest needs at least 2 class_labels");
  }
}

nlohmann::json RunnerManifest::to_json() const {
  nlohmann::json doc;
  doc["version"] = kManifestVersion;
  doc["task"] = std::string(to_string(task));
  doc["train_path"] = train_path.string();
  doc["test_path"] = test_path ? nlohmann::json(test_path->string()) : nlohmann::json(nullptr);
  doc["target_column"] = target_column ? nlohmann::json(*target_column) : nlohmann::json(nullptr);
  doc["task_kind"] = std::string(to_string(task_kind));
  doc["class_labels"] = class_labels;
  doc["k_clusters"] = k_clusters ? nlohmann::json(*k_clusters) : nlohmann::json(nullptr);
  doc["rank"] = rank ? nlohmann::json(*rank) : nlohmann::json(nullptr);
  doc["seed"] = seed;
  doc["output_paths"] = {
      {"interpretation", output_paths.interpretation.string()},
      {"predictions", output_paths.predictions ? nlohmann::json(output_paths.predictions->string())
                                               : nlohmann::json(nullptr)}};
  doc["timeout_seconds"] = timeout_seconds;
  doc["params"] = params;
  return doc;
}

RunnerManifest RunnerManifest::from_json(const nlohmann::json& doc) {
  try {
    if (!doc.contains("version") || doc.at("version") != kManifestVersion) {
      throw ValidationError("unsupported manifest version (expected " +
                            std::to_string(kManifestVersion) + ")");
    }
    RunnerManifest m;
    m.task = parse_interpretation_kind(doc.at("task").get<std::string>());
    m.train_path = doc.at("train_path").get<std::string>();
    auto opt_string = [&doc](const char* key) -> std::optional<std::string> {
      if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
      return doc.at(key).get<std::string>();
    };
    if (auto v = opt_string("test_path")) m.test_path = *v;
    m.target_column = opt_string("target_column");
    m.task_kind = parse_task_kind(doc.value("task_kind", std::string("unsupervised")));
    m.class_labels = doc.value("class_labels", std::vector<std::string>{});
    if (doc.contains("k_clusters") && !doc.at("k_clusters").is_null()) {
      m.k_clusters = doc.at("k_clusters").get<int>();
    }
    if (doc.contains("rank") && !doc.at("rank").is_null()) m.rank = doc.at("rank").get<std::size_t>();
    m.seed = doc.value("seed", std::uint64_t{0});
    const auto& out = doc.at("output_paths");
    m.output_paths.interpretation = out.at("interpretation").get<std::string>();
    if (out.contains("predictions") && !out.at("predictions").is_null()) {
      m.output_paths.predictions = out.at("predictions").get<std::string>();
    }
    m.timeout_seconds = doc.value("timeout_seconds", kDefaultTimeoutSeconds);
    m.params = doc.value("params", nlohmann::json::object());
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
}

void RunnerManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest " + path.string());
  out << to_json().dump(2) << '\n';
}

RunnerManifest RunnerManifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read manifest " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest is not valid JSON: " + std::string(e.what()));
  }
  return from_json(doc);
}

}  // namespace stabx::runner
