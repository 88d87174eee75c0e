#include "commands.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "stabx/core/dataset.hpp"
#include "stabx/core/errors.hpp"
#include "stabx/perturb/plan.hpp"
#include "stabx/pipeline/pipeline.hpp"
#include "stabx/pipeline/report.hpp"
#include "stabx/pipeline/score.hpp"
#include "stabx/runner/validate.hpp"

namespace stabx::cli {

namespace fs = std::filesystem;

int cmd_pipeline(const PipelineArgs& args) {
  const auto config = pipeline::PipelineConfig::load(args.config);
  pipeline::PipelineOptions options;
  options.workers = args.workers;
  if (args.output) options.output_dir = fs::path(*args.output);
  const auto summary = pipeline::run_pipeline(config, options);
  std::cout << summary.run_dir.string() << '\n';
  return summary.failed == 0 ? kExitOk : kExitPartial;
}

int cmd_perturb(const PerturbArgs& args) {
  std::size_t n = 0;
  if (args.data) {
    n = load_csv(*args.data, LoadOptions{}).n_samples();
  } else if (args.n_samples) {
    n = *args.n_samples;
  } else {
    throw ValidationError("give --data or --n-samples");
  }
  perturb::PerturbationPlan plan;
  switch (perturb::parse_plan_kind(args.kind)) {
    case perturb::PlanKind::split:
      plan = perturb::make_splits(n, args.ratio, args.repeats, args.seed);
      break;
    case perturb::PlanKind::subsample:
      plan = perturb::make_subsamples(n, args.ratio, args.repeats, args.seed);
      break;
    case perturb::PlanKind::noise:
      plan = perturb::make_noise_plan(n, perturb::parse_distribution(args.distribution), args.sigma,
                                      args.repeats, args.seed);
      break;
  }
  const std::string text = plan.to_json().dump(2) + "\n";
  if (args.out) {
    std::ofstream out(*args.out, std::ios::binary);
    out << text;
    if (!out) throw Error("failed writing " + *args.out);
  } else {
    std::cout << text;
  }
  return kExitOk;
}

int cmd_score(const ScoreArgs& args) {
  const fs::path run(args.run_dir);
  pipeline::MetricConfig metrics;
  std::ifstream info(pipeline::layout::run_info(run));
  if (info) {
    const auto doc = nlohmann::json::parse(info);
    if (doc.contains("metrics")) metrics = pipeline::metrics_from_json(doc.at("metrics"));
  }
  auto& s = metrics.spec;
  if (args.rank_metric) s.rank = metrics::parse_rank_metric(*args.rank_metric);
  if (args.k) s.k = *args.k;
  if (args.kendall_p) {
    if (*args.kendall_p < 0.0 || *args.kendall_p > 1.0) throw ValidationError("--kendall-p must lie in [0, 1]");
    s.kendall_p = *args.kendall_p;
  }
  if (args.partition_metric) s.partition = metrics::parse_partition_metric(*args.partition_metric);
  if (args.nn_grid) s.nn_grid = *args.nn_grid;
  if (args.nn_sample_cap) s.nn_sample_cap = *args.nn_sample_cap;
  pipeline::ScoreOptions options{metrics, std::nullopt};
  if (args.out) options.out_dir = fs::path(*args.out);
  pipeline::score_run(run, options);
  if (args.report) pipeline::write_report(run, options.out_dir);
  return kExitOk;
}

int cmd_report(const std::string& run_dir) {
  pipeline::write_report(run_dir);
  return kExitOk;
}

int cmd_validate(const ValidateArgs& args) {
  runner::ValidateOptions options;
  options.k_clusters = args.k_clusters;
  options.rank = args.rank;
  options.seed = args.seed;
  options.timeout_seconds = args.timeout_seconds;
  try {
    options.params = nlohmann::json::parse(args.params);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("--params: ") + e.what());
  }
  if (!options.params.is_object()) throw ValidationError("--params must be a JSON object");
  if (args.tasks.empty()) {
    if (args.target) options.tasks.push_back(InterpretationKind::feature_importance);
    options.tasks.push_back(InterpretationKind::clustering);
    options.tasks.push_back(InterpretationKind::dimension_reduction);
  } else {
    for (const auto& t : args.tasks) options.tasks.push_back(parse_interpretation_kind(t));
  }
  if (!runner::command_exists(args.command.front())) {
    throw ValidationError("runner command '" + args.command.front() + "' is not an executable");
  }
  const TaskKind kind = args.target ? parse_task_kind(args.task_kind) : TaskKind::unsupervised;
  const TabularDataset data = load_csv(args.data, LoadOptions{args.target, kind, "id", {}});
  const bool keep = args.work_dir.has_value();
  options.work_dir = keep ? fs::path(*args.work_dir)
                          : fs::temp_directory_path() / ("stabx-validate-" + std::to_string(::getpid()));

  const auto checks = runner::validate_runner(args.command, data, args.target.value_or("target"), options);
  bool all_ok = true;
  for (const auto& c : checks) {
    all_ok &= c.result.status == runner::RunStatus::ok;
    std::cout << to_string(c.task) << ": " << runner::to_string(c.result.status);
    if (!c.result.reason.empty()) std::cout << " (" << c.result.reason << ")";
    std::cout << '\n';
  }
  if (!keep) fs::remove_all(options.work_dir);
  return all_ok ? kExitOk : kExitPartial;
}

}  // namespace stabx::cli
