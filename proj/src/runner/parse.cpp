#include "stabx/runner/parse.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>

#include "stabx/core/csv.hpp"

namespace stabx::runner {
namespace {

csv::Table read_output(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InvalidOutputError("output file " + path.string() + " was not written");
  }
  try {
    return csv::read_file(path);
  } catch (const ParseError& e) {
    throw InvalidOutputError(path.filename().string() + ": " + e.what());
  }
}

void expect_header(const csv::Table& t, const std::vector<std::string>& want,
                   const std::filesystem::path& path) {
  if (t.header != want) {
    std::string joined;
    for (const auto& w : want) joined += (joined.empty() ? "" : ",") + w;
    throw InvalidOutputError(path.filename().string() + ": header must be '" + joined + "'");
  }
}

double number(const csv::Record& r, std::size_t col, const char* what) {
  const auto v = csv::parse_double(r.fields[col]);
  if (!v || !std::isfinite(*v)) {
    throw InvalidOutputError(std::string("line ") + std::to_string(r.line) + ": " + what +
                             " '" + r.fields[col] + "' is not a finite number");
  }
  return *v;
}

// Position of each row in `expected`, enforcing exact coverage.
std::vector<std::size_t> match_ids(const csv::Table& t, const std::vector<SampleId>& expected) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < expected.size(); ++i) pos.emplace(expected[i], i);
  std::vector<std::size_t> slot(t.rows.size());
  std::vector<bool> seen(expected.size(), false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& id = t.rows[r].fields[0];
    auto it = pos.find(id);
    if (it == pos.end()) {
      throw InvalidOutputError("line " + std::to_string(t.rows[r].line) + ": unknown sample id '" + id + "'");
    }
    if (seen[it->second]) {
      throw InvalidOutputError("line " + std::to_string(t.rows[r].line) + ": duplicate sample id '" + id + "'");
    }
    seen[it->second] = true;
    slot[r] = it->second;
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (!seen[i]) throw InvalidOutputError("sample id '" + expected[i] + "' is missing");
  }
  return slot;
}

std::vector<std::string> embedding_header(std::size_t rank) {
  std::vector<std::string> h{"sample_id"};
  for (std::size_t c = 1; c <= rank; ++c) h.push_back("c" + std::to_string(c));
  return h;
}

}  // namespace

Interpretation parse_interpretation(const std::filesystem::path& path, InterpretationKind task,
                                    const ExpectedDims& dims) {
  const csv::Table t = read_output(path);
  try {
    switch (task) {
      case InterpretationKind::feature_importance: {
        expect_header(t, {"feature_index", "score"}, path);
        if (t.rows.size() != dims.n_features) {
          throw InvalidOutputError("expected " + std::to_string(dims.n_features) +
                                   " feature rows, found " + std::to_string(t.rows.size()));
        }
        std::vector<double> scores(dims.n_features, 0.0);
        std::vector<bool> seen(dims.n_features, false);
        for (const auto& r : t.rows) {
          const auto idx = csv::parse_int(r.fields[0]);
          if (!idx || *idx < 0 || static_cast<std::size_t>(*idx) >= dims.n_features) {
            throw InvalidOutputError("line " + std::to_string(r.line) + ": feature index '" +
                                     r.fields[0] + "' outside [0, " +
                                     std::to_string(dims.n_features) + ")");
          }
          const auto j = static_cast<std::size_t>(*idx);
          if (seen[j]) {
            throw InvalidOutputError("line " + std::to_string(r.line) + ": duplicate feature index " +
                                     std::to_string(j));
          }
          seen[j] = true;
          scores[j] = number(r, 1, "score");
        }
        return FeatureRanking::from_scores(std::move(scores));
      }
      case InterpretationKind::clustering: {
        expect_header(t, {"sample_id", "label"}, path);
        if (!dims.k_clusters) throw InvalidOutputError("expected cluster count unknown");
        const auto slot = match_ids(t, dims.sample_ids);
        ClusterLabeling out{dims.sample_ids, std::vector<int>(dims.sample_ids.size(), 0),
                            *dims.k_clusters};
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
          const auto label = csv::parse_int(t.rows[r].fields[1]);
          if (!label) {
            throw InvalidOutputError("line " + std::to_string(t.rows[r].line) + ": label '" +
                                     t.rows[r].fields[1] + "' is not an integer");
          }
          if (*label < 0 || *label >= *dims.k_clusters) {
            throw InvalidOutputError("line " + std::to_string(t.rows[r].line) + ": label " +
                                     std::to_string(*label) + " outside [0, k_clusters = " +
                                     std::to_string(*dims.k_clusters) + ")");
          }
          out.labels[slot[r]] = static_cast<int>(*label);
        }
        out.validate();
        return out;
      }
      case InterpretationKind::dimension_reduction: {
        if (!dims.rank) throw InvalidOutputError("expected embedding rank unknown");
        expect_header(t, embedding_header(*dims.rank), path);
        const auto slot = match_ids(t, dims.sample_ids);
        Embedding out{dims.sample_ids,
                      Eigen::MatrixXd(static_cast<Eigen::Index>(dims.sample_ids.size()),
                                      static_cast<Eigen::Index>(*dims.rank)),
                      {}};
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
          for (std::size_t c = 0; c < *dims.rank; ++c) {
            out.coords(static_cast<Eigen::Index>(slot[r]), static_cast<Eigen::Index>(c)) =
                number(t.rows[r], c + 1, "coordinate");
          }
        }
        out.validate();
        return out;
      }
    }
  } catch (const InvalidOutputError&) {
    throw;
  } catch (const ValidationError& e) {
    throw InvalidOutputError(e.what());
  }
  throw InvalidOutputError("unknown task");
}

std::optional<InterpretationKind> sniff_interpretation(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line == "feature_index,score") return InterpretationKind::feature_importance;
  if (line == "sample_id,label") return InterpretationKind::clustering;
  if (line.rfind("sample_id,c1", 0) == 0) return InterpretationKind::dimension_reduction;
  return std::nullopt;
}

void write_interpretation(const Interpretation& value, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  if (const auto* r = std::get_if<FeatureRanking>(&value)) {
    csv::write_row(out, std::vector<std::string>{"feature_index", "score"});
    for (std::size_t j = 0; j < r->size(); ++j) {
      csv::write_row(out, std::vector<std::string>{std::to_string(j), csv::format_double(r->scores()[j])});
    }
  } else if (const auto* c = std::get_if<ClusterLabeling>(&value)) {
    csv::write_row(out, std::vector<std::string>{"sample_id", "label"});
    for (std::size_t i = 0; i < c->sample_ids.size(); ++i) {
      csv::write_row(out, std::vector<std::string>{c->sample_ids[i], std::to_string(c->labels[i])});
    }
  } else {
    const auto& e = std::get<Embedding>(value);
    csv::write_row(out, embedding_header(e.rank()));
    std::vector<std::string> row(e.rank() + 1);
    for (std::size_t i = 0; i < e.sample_ids.size(); ++i) {
      row[0] = e.sample_ids[i];
      for (std::size_t c = 0; c < e.rank(); ++c) {
        row[c + 1] = csv::format_double(e.coords(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
      }
      csv::write_row(out, row);
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

PredictionSet parse_predictions(const std::filesystem::path& path,
                                const PredictionExpectation& expected) {
  const csv::Table t = read_output(path);
  if (t.header.size() < 2 || t.header[0] != "sample_id" || t.header[1] != "prediction" ||
      (t.header.size() == 3 && t.header[2] != "truth") || t.header.size() > 3) {
    throw InvalidOutputError(path.filename().string() + ": header must be 'sample_id,prediction'");
  }
  const auto slot = match_ids(t, expected.sample_ids);
  std::unordered_map<std::string, std::size_t> code;
  for (std::size_t c = 0; c < expected.class_labels.size(); ++c) code.emplace(expected.class_labels[c], c);

  PredictionSet out{expected.sample_ids,
                    Eigen::VectorXd(static_cast<Eigen::Index>(expected.sample_ids.size())),
                    expected.truth, expected.classification};
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& rec = t.rows[r];
    double v = 0.0;
    if (expected.classification) {
      auto it = code.find(rec.fields[1]);
      if (it == code.end()) {
        throw InvalidOutputError("line " + std::to_string(rec.line) + ": prediction '" +
                                 rec.fields[1] + "' is not in the training label alphabet");
      }
      v = static_cast<double>(it->second);
    } else {
      v = number(rec, 1, "prediction");
    }
    out.values(static_cast<Eigen::Index>(slot[r])) = v;
  }
  out.validate();
  return out;
}

void write_predictions(const PredictionSet& preds, const std::filesystem::path& path,
                       const std::vector<std::string>& class_labels, bool with_truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  auto text = [&](double v) {
    if (preds.classification && !class_labels.empty()) {
      const auto c = static_cast<std::size_t>(std::llround(v));
      if (c < class_labels.size()) return class_labels[c];
    }
    return csv::format_double(v);
  };
  std::vector<std::string> header{"sample_id", "prediction"};
  if (with_truth) header.push_back("truth");
  csv::write_row(out, header);
  for (std::size_t i = 0; i < preds.sample_ids.size(); ++i) {
    std::vector<std::string> row{preds.sample_ids[i], text(preds.values(static_cast<Eigen::Index>(i)))};
    if (with_truth) row.push_back(text(preds.truth(static_cast<Eigen::Index>(i))));
    csv::write_row(out, row);
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace stabx::runner
