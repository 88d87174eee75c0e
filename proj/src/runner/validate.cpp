#include "stabx/runner/validate.hpp"

#include "stabx/core/errors.hpp"
#include "stabx/perturb/plan.hpp"

namespace stabx::runner {

std::vector<TaskCheck> validate_runner(const std::vector<std::string>& command, const TabularDataset& data,
                                       const std::string& target_name, const ValidateOptions& options) {
  const auto work = std::filesystem::absolute(options.work_dir);
  std::filesystem::create_directories(work);
  const TabularDataset features_only(data.sample_ids(), data.features(), data.feature_names(), std::nullopt,
                                     TaskKind::unsupervised);
  std::vector<TaskCheck> checks;
  for (auto task : options.tasks) {
    const std::string stem(to_string(task));
    RunnerManifest m;
    m.task = task;
    m.seed = options.seed;
    m.timeout_seconds = options.timeout_seconds;
    m.params = options.params;
    m.output_paths.interpretation = work / (stem + ".out.csv");
    m.train_path = work / (stem + ".train.csv");
    InvokeOptions o;
    o.log_dir = work;
    o.log_stem = stem;

    std::optional<TabularDataset> train;
    if (task == InterpretationKind::feature_importance) {
      if (!data.target()) throw ValidationError("feature importance needs a dataset with a target column");
      const auto plan = perturb::make_splits(data, options.split_ratio, 2, options.seed);
      train = data.subset(plan.draws[0].retained);
      const TabularDataset test = data.subset(plan.draws[0].held_out);
      write_csv(*train, m.train_path, target_name);
      m.test_path = work / (stem + ".test.csv");
      write_csv(test, *m.test_path, target_name);
      m.target_column = target_name;
      m.task_kind = data.task_kind();
      m.class_labels = data.class_names();
      m.output_paths.predictions = work / (stem + ".out.pred.csv");
      o.predictions = PredictionExpectation{test.sample_ids(), *test.target(),
                                            data.task_kind() == TaskKind::classification, data.class_names()};
    } else {
      train = features_only;
      write_csv(*train, m.train_path, target_name);
      if (task == InterpretationKind::clustering) m.k_clusters = options.k_clusters;
      if (task == InterpretationKind::dimension_reduction) m.rank = options.rank;
    }
    o.dims.n_features = train->n_features();
    o.dims.sample_ids = train->sample_ids();
    o.dims.k_clusters = m.k_clusters;
    o.dims.rank = m.rank;
    checks.push_back({task, invoke(command, m, o)});
  }
  return checks;
}

}  // namespace stabx::runner
