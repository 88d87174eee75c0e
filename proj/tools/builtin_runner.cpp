// External-runner wrapper around the built-in learners.
//
//   stabx-builtin-runner <manifest.json>
//
// params.method picks the learner (default ridge, kmeanspp or pca by task);
// the remaining params are passed to it unchanged.
#include <cstdio>
#include <exception>
#include <string>

#include "stabx/core/dataset.hpp"
#include "stabx/pipeline/builtins.hpp"
#include "stabx/runner/manifest.hpp"
#include "stabx/runner/parse.hpp"

namespace {

std::string default_method(stabx::InterpretationKind task) {
  switch (task) {
    case stabx::InterpretationKind::feature_importance:
      return "ridge";
    case stabx::InterpretationKind::clustering:
      return "kmeanspp";
    case stabx::InterpretationKind::dimension_reduction:
      return "pca";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <manifest.json>\n", argv[0]);
    return 2;
  }
  try {
    using namespace stabx;
    const auto m = runner::RunnerManifest::read(argv[1]);
    nlohmann::json params = m.params;
    const std::string method = params.value("method", default_method(m.task));
    params.erase("method");
    if (pipeline::builtin_kind(method) != m.task) {
      std::fprintf(stderr, "method '%s' does not produce %s\n", method.c_str(),
                   std::string(to_string(m.task)).c_str());
      return 2;
    }
    const LoadOptions load{m.target_column, m.task_kind, "id", m.class_labels};
    const TabularDataset train = load_csv(m.train_path, load);
    std::optional<TabularDataset> test;
    if (m.test_path) test = load_csv(*m.test_path, load);

    const auto out = pipeline::run_builtin(
        method, {&train, test ? &*test : nullptr, m.k_clusters, m.rank, m.seed, params});
    runner::write_interpretation(out.interpretation, m.output_paths.interpretation);
    if (m.output_paths.predictions) {
      if (!out.predictions) {
        std::fprintf(stderr, "method '%s' makes no predictions\n", method.c_str());
        return 1;
      }
      runner::write_predictions(*out.predictions, *m.output_paths.predictions, m.class_labels);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
