#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabx/core/types.hpp"
#include "stabx/runner/manifest.hpp"
#include "stabx/runner/parse.hpp"

namespace stabx::runner {

enum class RunStatus { ok, timeout, crash, invalid_output };

std::string_view to_string(RunStatus status);

struct RunnerResult {
  RunStatus status = RunStatus::crash;
  // Exit code for crashes; -signal when the child was killed by a signal.
  int exit_code = 0;
  std::string reason;
  double wall_seconds = 0.0;
  // Present iff status == ok.
  std::optional<Interpretation> artifact;
  std::optional<PredictionSet> predictions;
};

struct InvokeOptions {
  // Manifest, stdout and stderr are written as <log_stem>.manifest.json,
  // <log_stem>.stdout.log and <log_stem>.stderr.log in this directory.
  std::filesystem::path log_dir;
  std::string log_stem = "runner";
  std::chrono::milliseconds poll_interval{10};
  ExpectedDims dims;
  // Required when the manifest asks for predictions.
  std::optional<PredictionExpectation> predictions;
};

// True when argv0 names an executable file, directly or through PATH.
bool command_exists(const std::string& argv0);

// Writes the manifest, runs `command` with the manifest path appended as
// its last argument in a fresh process group, and enforces the manifest
// timeout. The whole group is killed on timeout and again after exit so no
// descendants survive. Child failures are reported in the status; only
// harness-side problems (unwritable log dir, empty command) throw.
RunnerResult invoke(const std::vector<std::string>& command, const RunnerManifest& manifest,
                    const InvokeOptions& options);

}  // namespace stabx::runner
