#include <exception>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "stabx/core/errors.hpp"
#include "stabx/pipeline/config.hpp"
#include "stabx/pipeline/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace stabx::cli;
  spdlog::set_default_logger(spdlog::stderr_color_st("stabx"));

  CLI::App app{"Stability of machine learning interpretations"};
  app.set_version_flag("--version", std::string(stabx::pipeline::kVersion));
  app.require_subcommand(1);
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  PipelineArgs pipeline_args;
  auto* pipeline = app.add_subcommand("pipeline", "Run perturb, interpret, score and report from a config");
  pipeline->add_option("config", pipeline_args.config, "JSON config file")->required()->check(CLI::ExistingFile);
  pipeline->add_option("-w,--workers", pipeline_args.workers, "Concurrent units")->check(CLI::PositiveNumber);
  pipeline->add_option("-o,--output", pipeline_args.output, "Run directory (overrides output_dir)");

  PerturbArgs perturb_args;
  auto* perturb = app.add_subcommand("perturb", "Write a perturbation plan");
  auto* data_opt = perturb->add_option("--data", perturb_args.data, "Dataset CSV giving the sample count")
                       ->check(CLI::ExistingFile);
  perturb->add_option("-n,--n-samples", perturb_args.n_samples, "Sample count")->excludes(data_opt);
  perturb->add_option("--kind", perturb_args.kind, "split, subsample or noise")
      ->check(CLI::IsMember({"split", "subsample", "noise"}));
  perturb->add_option("--ratio", perturb_args.ratio, "Train ratio or retained fraction");
  perturb->add_option("--repeats", perturb_args.repeats, "Number of repeats")->check(CLI::PositiveNumber);
  perturb->add_option("--seed", perturb_args.seed, "Base seed");
  perturb->add_option("--sigma", perturb_args.sigma, "Noise scale");
  perturb->add_option("--distribution", perturb_args.distribution, "normal or laplace")
      ->check(CLI::IsMember({"normal", "laplace"}));
  perturb->add_option("-o,--out", perturb_args.out, "Output plan file (default stdout)");

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Recompute stability tables from artifacts");
  score->add_option("run_dir", score_args.run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  score->add_option("--rank-metric", score_args.rank_metric, "ao, jaccard or kendall");
  score->add_option("-k,--k", score_args.k, "Top-k depth")->check(CLI::PositiveNumber);
  score->add_option("--kendall-p", score_args.kendall_p, "Kendall penalty in [0, 1]");
  score->add_option("--partition-metric", score_args.partition_metric, "ari, fm, mi or v_measure");
  score->add_option("--nn-grid", score_args.nn_grid, "Neighbor-count grid size");
  score->add_option("--nn-sample-cap", score_args.nn_sample_cap, "Rows evaluated by neighbor metrics");
  score->add_option("-o,--out", score_args.out, "Output directory (default <run_dir>/scores)");
  score->add_flag("--report", score_args.report, "Also rebuild the report");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Rebuild report files from scores");
  report->add_option("run_dir", report_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate-runner", "Check an external runner against the protocol");
  validate->add_option("command", validate_args.command, "Runner argv (put it after --)")
      ->required()
      ->expected(-1);
  validate->add_option("--data", validate_args.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  validate->add_option("--target", validate_args.target, "Target column for feature importance");
  validate->add_option("--task-kind", validate_args.task_kind, "regression or classification")
      ->check(CLI::IsMember({"regression", "classification"}));
  validate->add_option("--tasks", validate_args.tasks,
                       "Subset of feature_importance, clustering, dimension_reduction");
  validate->add_option("--k", validate_args.k_clusters, "Cluster count")->check(CLI::PositiveNumber);
  validate->add_option("--rank", validate_args.rank, "Embedding rank")->check(CLI::PositiveNumber);
  validate->add_option("--seed", validate_args.seed, "Runner seed");
  validate->add_option("--timeout", validate_args.timeout_seconds, "Seconds per task")->check(CLI::PositiveNumber);
  validate->add_option("--params", validate_args.params, "JSON object passed as manifest params");
  validate->add_option("--work-dir", validate_args.work_dir, "Keep manifests, outputs and logs here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(quiet ? spdlog::level::warn : verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*pipeline) return cmd_pipeline(pipeline_args);
    if (*perturb) return cmd_perturb(perturb_args);
    if (*score) return cmd_score(score_args);
    if (*report) return cmd_report(report_dir);
    if (*validate) return cmd_validate(validate_args);
  } catch (const stabx::pipeline::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const stabx::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitFatal;
}
