#include "stabx/pipeline/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "stabx/core/csv.hpp"
#include "stabx/core/errors.hpp"
#include "stabx/core/random.hpp"
#include "stabx/pipeline/pipeline.hpp"
#include "stabx/stability/aggregate.hpp"
#include "stabx/stability/association.hpp"

namespace stabx::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::optional<std::size_t>> competition_ranks(const std::vector<std::optional<double>>& values) {
  std::vector<std::optional<std::size_t>> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    std::size_t better = 0;
    for (const auto& v : values) {
      if (v && *v > *values[i]) ++better;
    }
    ranks[i] = better + 1;
  }
  return ranks;
}

std::vector<std::string> order_datasets(std::vector<DatasetShape> shapes) {
  auto ratio = [](const DatasetShape& s) {
    return s.n_features == 0 ? std::numeric_limits<double>::infinity()
                             : static_cast<double>(s.n_samples) / static_cast<double>(s.n_features);
  };
  std::sort(shapes.begin(), shapes.end(), [&](const DatasetShape& a, const DatasetShape& b) {
    const double ra = ratio(a);
    const double rb = ratio(b);
    if (ra != rb) return ra < rb;
    return a.id < b.id;
  });
  std::vector<std::string> out;
  for (const auto& s : shapes) out.push_back(s.id);
  return out;
}

BumpRanking bump_ranking(const stability::StabilityTable& table, const std::vector<std::string>& dataset_order) {
  BumpRanking out;
  out.methods = table.methods;
  std::vector<std::vector<double>> present(table.methods.size());
  for (const auto& id : dataset_order) {
    const auto it = std::find(table.datasets.begin(), table.datasets.end(), id);
    if (it == table.datasets.end()) continue;
    const auto d = static_cast<std::size_t>(it - table.datasets.begin());
    std::vector<std::optional<double>> values;
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
      values.push_back(table.at(d, m).value);
      if (table.at(d, m).value) present[m].push_back(*table.at(d, m).value);
    }
    out.datasets.push_back(id);
    out.ranks.push_back(competition_ranks(values));
  }
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    BumpAverage a{table.methods[m], std::nullopt, present[m].size()};
    if (!present[m].empty()) a.mean = stability::ordered_mean(present[m]);
    out.average.push_back(a);
  }
  std::stable_sort(out.average.begin(), out.average.end(), [](const BumpAverage& a, const BumpAverage& b) {
    if (a.mean.has_value() != b.mean.has_value()) return a.mean.has_value();
    if (a.mean && *a.mean != *b.mean) return *a.mean > *b.mean;
    return a.method < b.method;
  });
  return out;
}

namespace {

std::string num(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return csv::format_double(v.get<double>());
  if (v.is_number()) return std::to_string(v.get<long long>());
  return v.get<std::string>();
}

std::string opt_num(const std::optional<double>& v) { return v ? csv::format_double(*v) : ""; }

// Writes CSV files into the report directory and remembers their hashes.
class Bundle {
 public:
  explicit Bundle(fs::path dir) : dir_(std::move(dir)) {}

  void table(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    csv::write_row(out, header);
    for (const auto& r : rows) csv::write_row(out, r);
    put(name, out.str());
  }

  // Rows of a JSON array, one column per key in `header`.
  void rows(const std::string& name, const std::vector<std::string>& header, const json& items) {
    std::vector<std::vector<std::string>> out;
    for (const auto& item : items) {
      std::vector<std::string> r;
      for (const auto& h : header) r.push_back(num(item.at(h)));
      out.push_back(std::move(r));
    }
    table(name, header, out);
  }

  void put(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    f << content;
    if (!f) throw Error("failed writing " + (dir_ / name).string());
    files_[name] = hex64(fnv1a64(content));
  }

  json manifest() const {
    json out = json::array();
    for (const auto& [name, hash] : files_) out.push_back({{"file", name}, {"hash", hash}});
    return out;
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> files_;
};

void heatmap(Bundle& bundle, const std::string& name, const stability::StabilityTable& t) {
  std::ostringstream out;
  t.write_csv(out);
  bundle.put(name, out.str());
}

void bump(Bundle& bundle, const std::string& kind, const stability::StabilityTable& t,
          const std::vector<std::string>& order) {
  const BumpRanking b = bump_ranking(t, order);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t d = 0; d < b.datasets.size(); ++d) {
    const auto it = std::find(t.datasets.begin(), t.datasets.end(), b.datasets[d]);
    const auto td = static_cast<std::size_t>(it - t.datasets.begin());
    for (std::size_t m = 0; m < b.methods.size(); ++m) {
      rows.push_back({b.datasets[d], std::to_string(d + 1), b.methods[m], opt_num(t.at(td, m).value),
                      b.ranks[d][m] ? std::to_string(*b.ranks[d][m]) : ""});
    }
  }
  bundle.table("bump_" + kind + ".csv", {"dataset", "dataset_position", "method", "value", "rank"}, rows);
  rows.clear();
  for (std::size_t i = 0; i < b.average.size(); ++i) {
    const auto& a = b.average[i];
    rows.push_back({std::to_string(i + 1), a.method, opt_num(a.mean), std::to_string(a.n_datasets)});
  }
  bundle.table("bump_" + kind + "_average.csv", {"position", "method", "mean", "n_datasets"}, rows);
}

struct Point {
  std::string dataset;
  std::string method;
  double stability = 0.0;
  double accuracy = 0.0;
};

void association(Bundle& bundle, const std::string& kind, const stability::StabilityTable& within,
                 const stability::StabilityTable& accuracy) {
  std::vector<Point> points;
  for (std::size_t d = 0; d < within.datasets.size(); ++d) {
    for (std::size_t m = 0; m < within.methods.size(); ++m) {
      const auto& s = within.at(d, m).value;
      const auto& a = accuracy.at(d, m).value;
      if (s && a) points.push_back({within.datasets[d], within.methods[m], *s, *a});
    }
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : points) {
    rows.push_back({p.dataset, p.method, csv::format_double(p.stability), csv::format_double(p.accuracy)});
  }
  bundle.table("scatter_" + kind + ".csv", {"dataset", "method", "stability", "accuracy"}, rows);

  rows.clear();
  for (const char* panel : {"by_dataset", "by_method"}) {
    const bool by_dataset = std::string(panel) == "by_dataset";
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> lines;
    for (const auto& p : points) {
      auto& [x, y] = lines[by_dataset ? p.dataset : p.method];
      x.push_back(p.stability);
      y.push_back(p.accuracy);
    }
    for (const auto& [line, xy] : lines) {
      const auto fit = stability::fit_association(xy.first, xy.second, lines.size());
      rows.push_back({panel, line, std::to_string(fit.n), fit.valid ? csv::format_double(fit.slope) : "",
                      fit.valid ? csv::format_double(fit.intercept) : "", opt_num(fit.t_statistic),
                      opt_num(fit.p_value), opt_num(fit.p_corrected), std::to_string(fit.m_tests), fit.flag});
    }
  }
  bundle.table("association_" + kind + ".csv",
               {"panel", "line", "n", "slope", "intercept", "t_statistic", "p_value", "p_corrected", "m_tests",
                "flag"},
               rows);
}

}  // namespace

void write_report(const fs::path& run_dir, const std::optional<fs::path>& scores_dir) {
  const fs::path scores_path = scores_dir.value_or(run_dir / "scores") / "scores.json";
  std::ifstream in(scores_path);
  if (!in) throw ValidationError("no scores at " + scores_path.string() + "; run 'stabx score' first");
  const json scores = json::parse(in);

  const fs::path dir = run_dir / "report";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Bundle bundle(dir);

  std::vector<DatasetShape> shapes;
  for (const auto& d : scores.at("datasets")) {
    shapes.push_back({d.at("id").get<std::string>(), d.at("n_samples").get<std::size_t>(),
                      d.at("n_features").get<std::size_t>()});
  }
  const auto order = order_datasets(shapes);

  for (const auto& [kind, table_doc] : scores.at("within").items()) {
    const auto within = stability::StabilityTable::from_json(table_doc);
    const auto accuracy = stability::StabilityTable::from_json(scores.at("accuracy").at(kind));
    heatmap(bundle, "within_" + kind + ".csv", within);
    heatmap(bundle, "accuracy_" + kind + ".csv", accuracy);
    bundle.rows("between_" + kind + ".csv", {"dataset", "method_a", "method_b", "metric", "value", "pairs", "note"},
                scores.at("between").at(kind));
    bump(bundle, kind, within, order);
    association(bundle, kind, within, accuracy);
  }
  bundle.rows("prediction_stability.csv",
              {"dataset", "method", "measure", "value", "n_samples", "excluded", "repeats_ok", "repeats_total"},
              scores.at("prediction_stability"));
  bundle.rows("between_prediction.csv", {"dataset", "method_a", "method_b", "measure", "value"},
              scores.at("between_prediction"));
  for (const auto& [name, series] : scores.at("sweeps").items()) {
    if (series.empty()) continue;
    bundle.rows("line_" + name + ".csv", {"method", "dataset", "x", "y", "n_pairs"}, series);
  }

  json provenance{{"metrics", scores.at("metrics")}, {"scores_hash", hex64(fnv1a64(scores.dump()))}};
  std::ifstream run_in(layout::run_info(run_dir));
  if (run_in) {
    const json run = json::parse(run_in);
    for (const char* key : {"version", "config_hash", "seed", "standardize"}) {
      if (run.contains(key)) provenance[key] = run.at(key);
    }
  }
  provenance["report_version"] = std::string(kVersion);
  const json index{{"provenance", provenance}, {"dataset_order", order}, {"files", bundle.manifest()}};
  std::ofstream out(dir / "index.json", std::ios::binary);
  out << index.dump(2) << '\n';
  if (!out) throw Error("failed writing report index");
  spdlog::info("report written to {}", dir.string());
}

}  // namespace stabx::pipeline
