#include "stabx/core/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "stabx/core/csv.hpp"
#include "stabx/core/errors.hpp"
#include "stabx/core/random.hpp"

namespace stabx {

TabularDataset::TabularDataset(std::vector<SampleId> sample_ids,
                               Eigen::MatrixXd features,
                               std::vector<std::string> feature_names,
                               std::optional<Eigen::VectorXd> target,
                               TaskKind task_kind,
                               std::vector<std::string> class_names)
    : sample_ids_(std::move(sample_ids)),
      features_(std::move(features)),
      feature_names_(std::move(feature_names)),
      target_(std::move(target)),
      task_kind_(task_kind),
      class_names_(std::move(class_names)) {
  const auto n = static_cast<Eigen::Index>(sample_ids_.size());
  if (n < 1) throw ValidationError("dataset has no samples");
  if (feature_names_.empty()) throw ValidationError("dataset has no features");
  if (features_.rows() != n ||
      features_.cols() != static_cast<Eigen::Index>(feature_names_.size())) {
    throw ValidationError("feature matrix shape does not match ids and names");
  }
  if (!features_.allFinite()) {
    throw ValidationError("feature matrix contains non-finite values");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : sample_ids_) {
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate sample id '" + id + "'");
    }
  }
  seen.clear();
  for (const auto& name : feature_names_) {
    if (!seen.insert(name).second) {
      throw ValidationError("duplicate feature name '" + name + "'");
    }
  }
  if (task_kind_ != TaskKind::unsupervised && !target_) {
    throw ValidationError("supervised dataset requires a target");
  }
  if (target_) {
    if (target_->size() != n) {
      throw ValidationError("target length does not match sample count");
    }
    if (!target_->allFinite()) {
      throw ValidationError("target contains non-finite values");
    }
    const bool categorical = task_kind_ != TaskKind::regression;
    if (categorical) {
      const auto c = static_cast<double>(class_names_.size());
      if (task_kind_ == TaskKind::classification && class_names_.size() < 2) {
        throw ValidationError("classification target needs at least 2 classes");
      }
      for (double v : *target_) {
        if (v != std::floor(v) || v < 0 || v >= c) {
          throw ValidationError("class label outside [0, C)");
        }
      }
    }
  }
}

TabularDataset TabularDataset::subset(std::span<const std::size_t> rows) const {
  std::vector<SampleId> ids;
  ids.reserve(rows.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::optional<Eigen::VectorXd> y;
  if (target_) y = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    if (rows[i] >= n_samples()) throw ValidationError("subset row out of range");
    ids.push_back(sample_ids_[rows[i]]);
    x.row(static_cast<Eigen::Index>(i)) = features_.row(r);
    if (y) (*y)(static_cast<Eigen::Index>(i)) = (*target_)(r);
  }
  TabularDataset out(std::move(ids), std::move(x), feature_names_, std::move(y),
                     task_kind_, class_names_);
  out.constant_columns_ = constant_columns_;
  return out;
}

TabularDataset TabularDataset::with_features(Eigen::MatrixXd features) const {
  TabularDataset out(sample_ids_, std::move(features), feature_names_, target_,
                     task_kind_, class_names_);
  out.constant_columns_ = constant_columns_;
  return out;
}

namespace {

bool is_missing(std::string_view cell) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
    cell.remove_prefix(1);
  }
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) {
    cell.remove_suffix(1);
  }
  return cell.empty() || cell == "NA" || cell == "N/A" || cell == "NaN" ||
         cell == "nan" || cell == "null";
}

}  // namespace

TabularDataset load_csv(const std::filesystem::path& path,
                        const LoadOptions& options) {
  const csv::Table table = csv::read_file(path);

  std::optional<std::size_t> target_col;
  if (options.target) {
    target_col = table.column(*options.target);
    if (!target_col) {
      throw ValidationError("target column '" + *options.target +
                            "' not found in " + path.string());
    }
  } else if (options.task_kind != TaskKind::unsupervised) {
    throw ValidationError("supervised dataset requires a target column");
  }
  const auto id_col = table.column(options.id_column);

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == target_col || c == id_col) continue;
    if (!seen.insert(table.header[c]).second) {
      throw ValidationError("duplicate feature name '" + table.header[c] + "'");
    }
    feature_cols.push_back(c);
    names.push_back(table.header[c]);
  }
  if (table.rows.empty()) {
    throw ValidationError("dataset " + path.string() + " is empty");
  }

  std::size_t missing_rows = 0;
  std::size_t first_missing_line = 0;
  std::vector<const csv::Record*> complete;
  for (const auto& row : table.rows) {
    bool missing = false;
    for (std::size_t c : feature_cols) missing = missing || is_missing(row.fields[c]);
    if (target_col) missing = missing || is_missing(row.fields[*target_col]);
    if (missing) {
      if (missing_rows++ == 0) first_missing_line = row.line;
    } else {
      complete.push_back(&row);
    }
  }
  if (missing_rows > 0) {
    throw ParseError(std::to_string(missing_rows) +
                         " row(s) contain missing values (first at row " +
                         std::to_string(first_missing_line) + ")",
                     first_missing_line);
  }

  const auto n = static_cast<Eigen::Index>(complete.size());
  if (n < 2) throw ValidationError("dataset needs at least 2 samples");
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(feature_cols.size()));
  std::vector<SampleId> ids;
  ids.reserve(complete.size());
  std::optional<Eigen::VectorXd> y;
  if (target_col) y = Eigen::VectorXd(n);

  std::vector<std::string> classes = options.class_names;
  std::unordered_map<std::string, std::size_t> class_index;
  for (std::size_t c = 0; c < classes.size(); ++c) class_index[classes[c]] = c;
  const bool fixed_alphabet = !classes.empty();

  for (Eigen::Index i = 0; i < n; ++i) {
    const csv::Record& row = *complete[static_cast<std::size_t>(i)];
    ids.push_back(id_col ? row.fields[*id_col] : std::to_string(i));
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const std::string& cell = row.fields[feature_cols[j]];
      const auto value = csv::parse_double(cell);
      if (!value || !std::isfinite(*value)) {
        throw ParseError("non-numeric value '" + cell + "' in column '" +
                             names[j] + "' at row " + std::to_string(row.line),
                         row.line);
      }
      x(i, static_cast<Eigen::Index>(j)) = *value;
    }
    if (!target_col) continue;
    const std::string& cell = row.fields[*target_col];
    if (options.task_kind == TaskKind::regression) {
      const auto value = csv::parse_double(cell);
      if (!value || !std::isfinite(*value)) {
        throw ParseError("non-numeric target '" + cell + "' at row " +
                             std::to_string(row.line),
                         row.line);
      }
      (*y)(i) = *value;
    } else {
      auto it = class_index.find(cell);
      if (it == class_index.end()) {
        if (fixed_alphabet) {
          throw ParseError("class label '" + cell + "' at row " +
                               std::to_string(row.line) +
                               " is not in the declared alphabet",
                           row.line);
        }
        it = class_index.emplace(cell, classes.size()).first;
        classes.push_back(cell);
      }
      (*y)(i) = static_cast<double>(it->second);
    }
  }

  return TabularDataset(std::move(ids), std::move(x), std::move(names),
                        std::move(y), options.task_kind, std::move(classes));
}

void write_csv(const TabularDataset& dataset, const std::filesystem::path& path,
               const std::string& target_name) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  std::vector<std::string> fields;
  fields.push_back("id");
  for (const auto& name : dataset.feature_names()) fields.push_back(name);
  const auto& target = dataset.target();
  if (target) fields.push_back(target_name);
  csv::write_row(out, fields);

  const auto& x = dataset.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    fields.clear();
    fields.push_back(dataset.sample_ids()[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      fields.push_back(csv::format_double(x(i, j)));
    }
    if (target) {
      const double v = (*target)(i);
      if (dataset.task_kind() == TaskKind::regression) {
        fields.push_back(csv::format_double(v));
      } else {
        fields.push_back(dataset.class_names()[static_cast<std::size_t>(v)]);
      }
    }
    csv::write_row(out, fields);
  }
}

TabularDataset standardize(const TabularDataset& dataset) {
  Eigen::MatrixXd x = dataset.features();
  const auto n = static_cast<double>(x.rows());
  std::vector<std::size_t> constant;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double ss = col.squaredNorm();
    const double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    const double scale = std::max(std::abs(mean), 1.0);
    if (!(sd > 1e-12 * scale)) {
      col.setZero();
      constant.push_back(static_cast<std::size_t>(j));
    } else {
      col /= sd;
    }
  }
  TabularDataset out = dataset.with_features(std::move(x));
  out.constant_columns_ = std::move(constant);
  return out;
}

std::string content_hash(const TabularDataset& dataset) {
  std::ostringstream os;
  os << to_string(dataset.task_kind()) << '\n';
  for (const auto& id : dataset.sample_ids()) os << id << ',';
  os << '\n';
  for (const auto& name : dataset.feature_names()) os << name << ',';
  os << '\n';
  const auto& x = dataset.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      os << csv::format_double(x(i, j)) << ',';
    }
  }
  if (dataset.target()) {
    os << '\n';
    for (double v : *dataset.target()) os << csv::format_double(v) << ',';
  }
  for (const auto& c : dataset.class_names()) os << c << ',';
  return hex64(fnv1a64(os.str()));
}

}  // namespace stabx
