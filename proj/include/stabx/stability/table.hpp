#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabx/stability/aggregate.hpp"

namespace stabx::stability {

struct TableCell {
  // Absent for missing cells; never filled with 0.
  std::optional<double> value;
  std::string metric;
  std::size_t repeats_ok = 0;
  std::size_t repeats_total = 0;
  std::size_t pairs = 0;
  std::size_t skipped_pairs = 0;
  std::string note;
};

TableCell make_cell(const PairwiseSummary& summary, std::string metric);

// Dataset x method grid of aggregated scores.
struct StabilityTable {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  // cells[d][m]
  std::vector<std::vector<TableCell>> cells;

  StabilityTable() = default;
  StabilityTable(std::vector<std::string> datasets, std::vector<std::string> methods);

  TableCell& at(std::size_t dataset, std::size_t method) { return cells[dataset][method]; }
  const TableCell& at(std::size_t dataset, std::size_t method) const {
    return cells[dataset][method];
  }

  nlohmann::json to_json() const;
  static StabilityTable from_json(const nlohmann::json& doc);
  // Tidy rows: dataset,method,metric,value,repeats_ok,repeats_total,pairs,
  // skipped_pairs,note. Missing values are empty fields.
  void write_csv(std::ostream& out) const;
};

}  // namespace stabx::stability
