#include "stabx/stability/table.hpp"

#include <ostream>

#include "stabx/core/csv.hpp"
#include "stabx/core/errors.hpp"

namespace stabx::stability {

TableCell make_cell(const PairwiseSummary& summary, std::string metric) {
  TableCell cell;
  cell.value = summary.mean;
  cell.metric = std::move(metric);
  cell.repeats_ok = summary.repeats_ok;
  cell.repeats_total = summary.repeats_total;
  cell.pairs = summary.pairs;
  cell.skipped_pairs = summary.skipped_pairs;
  cell.note = summary.note;
  return cell;
}

StabilityTable::StabilityTable(std::vector<std::string> datasets_in,
                               std::vector<std::string> methods_in)
    : datasets(std::move(datasets_in)), methods(std::move(methods_in)) {
  cells.assign(datasets.size(), std::vector<TableCell>(methods.size()));
}

nlohmann::json StabilityTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const TableCell& c = cells[d][m];
      rows.push_back({{"dataset", datasets[d]},
                      {"method", methods[m]},
                      {"metric", c.metric},
                      {"value", c.value ? nlohmann::json(*c.value) : nlohmann::json(nullptr)},
                      {"repeats_ok", c.repeats_ok},
                      {"repeats_total", c.repeats_total},
                      {"pairs", c.pairs},
                      {"skipped_pairs", c.skipped_pairs},
                      {"note", c.note}});
    }
  }
  return {{"datasets", datasets}, {"methods", methods}, {"cells", rows}};
}

StabilityTable StabilityTable::from_json(const nlohmann::json& doc) {
  StabilityTable t(doc.at("datasets").get<std::vector<std::string>>(),
                   doc.at("methods").get<std::vector<std::string>>());
  const auto& rows = doc.at("cells");
  if (rows.size() != t.datasets.size() * t.methods.size()) {
    throw ValidationError("stability table has " + std::to_string(rows.size()) + " cells, expected " +
                          std::to_string(t.datasets.size() * t.methods.size()));
  }
  std::size_t i = 0;
  for (std::size_t d = 0; d < t.datasets.size(); ++d) {
    for (std::size_t m = 0; m < t.methods.size(); ++m, ++i) {
      const auto& r = rows[i];
      TableCell& c = t.cells[d][m];
      if (!r.at("value").is_null()) c.value = r.at("value").get<double>();
      c.metric = r.at("metric").get<std::string>();
      c.repeats_ok = r.at("repeats_ok").get<std::size_t>();
      c.repeats_total = r.at("repeats_total").get<std::size_t>();
      c.pairs = r.at("pairs").get<std::size_t>();
      c.skipped_pairs = r.at("skipped_pairs").get<std::size_t>();
      c.note = r.at("note").get<std::string>();
    }
  }
  return t;
}

void StabilityTable::write_csv(std::ostream& out) const {
  const std::vector<std::string> header{"dataset",       "method", "metric", "value",
                                        "repeats_ok",    "repeats_total", "pairs",
                                        "skipped_pairs", "note"};
  csv::write_row(out, header);
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const TableCell& c = cells[d][m];
      const std::vector<std::string> row{datasets[d],
                                         methods[m],
                                         c.metric,
                                         c.value ? csv::format_double(*c.value) : "",
                                         std::to_string(c.repeats_ok),
                                         std::to_string(c.repeats_total),
                                         std::to_string(c.pairs),
                                         std::to_string(c.skipped_pairs),
                                         c.note};
      csv::write_row(out, row);
    }
  }
}

}  // namespace stabx::stability
