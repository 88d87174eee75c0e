#include "stabx/runner/invoke.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "stabx/core/errors.hpp"

namespace stabx::runner {
namespace {

bool is_executable(const std::filesystem::path& p) {
  struct stat st {};
  return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
}

void kill_group(pid_t pgid) {
  if (::kill(-pgid, SIGKILL) != 0 && errno != ESRCH) {
    spdlog::warn("could not signal process group {}: errno {}", pgid, errno);
  }
}

}  // namespace

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ok:
      return "ok";
    case RunStatus::timeout:
      return "timeout";
    case RunStatus::crash:
      return "crash";
    case RunStatus::invalid_output:
      return "invalid_output";
  }
  return "unknown";
}

bool command_exists(const std::string& argv0) {
  if (argv0.empty()) return false;
  if (argv0.find('/') != std::string::npos) return is_executable(argv0);
  const char* path = std::getenv("PATH");
  std::stringstream dirs(path ? path : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (is_executable(std::filesystem::path(dir.empty() ? "." : dir) / argv0)) return true;
  }
  return false;
}

RunnerResult invoke(const std::vector<std::string>& command, const RunnerManifest& manifest,
                    const InvokeOptions& options) {
  if (command.empty()) throw ValidationError("runner command is empty");
  manifest.validate();
  std::filesystem::create_directories(options.log_dir);
  const auto manifest_path =
      std::filesystem::absolute(options.log_dir / (options.log_stem + ".manifest.json"));
  const auto out_log = options.log_dir / (options.log_stem + ".stdout.log");
  const auto err_log = options.log_dir / (options.log_stem + ".stderr.log");
  manifest.write(manifest_path);
  // Stale outputs from an earlier attempt must not pass for fresh ones.
  std::filesystem::remove(manifest.output_paths.interpretation);
  if (manifest.output_paths.predictions) std::filesystem::remove(*manifest.output_paths.predictions);

  // Everything the child touches is prepared before fork.
  std::vector<std::string> args = command;
  args.push_back(manifest_path.string());
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  const std::string out_path = out_log.string();
  const std::string err_path = err_log.string();

  RunnerResult result;
  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + std::chrono::seconds(manifest.timeout_seconds);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    const int in_fd = ::open("/dev/null", O_RDONLY);
    const int out_fd = ::open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    const int err_fd = ::open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (in_fd >= 0) ::dup2(in_fd, STDIN_FILENO);
    if (out_fd >= 0) ::dup2(out_fd, STDOUT_FILENO);
    if (err_fd >= 0) ::dup2(err_fd, STDERR_FILENO);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  int wstatus = 0;
  bool timed_out = false;
  for (;;) {
    const pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw Error("waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      timed_out = true;
      kill_group(pid);
      while (::waitpid(pid, &wstatus, 0) < 0 && errno == EINTR) {
      }
      break;
    }
    std::this_thread::sleep_for(options.poll_interval);
  }
  // Descendants left behind by a runner that exited on its own.
  kill_group(pid);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (timed_out) {
    result.status = RunStatus::timeout;
    result.reason = "killed after " + std::to_string(manifest.timeout_seconds) + " s";
    return result;
  }
  if (WIFSIGNALED(wstatus)) {
    result.status = RunStatus::crash;
    result.exit_code = -WTERMSIG(wstatus);
    result.reason = "terminated by signal " + std::to_string(WTERMSIG(wstatus));
    return result;
  }
  result.exit_code = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1;
  if (result.exit_code != 0) {
    result.status = RunStatus::crash;
    result.reason = "exit code " + std::to_string(result.exit_code);
    return result;
  }
  try {
    result.artifact =
        parse_interpretation(manifest.output_paths.interpretation, manifest.task, options.dims);
    if (manifest.output_paths.predictions) {
      if (!options.predictions) throw ValidationError("no prediction expectation supplied");
      result.predictions = parse_predictions(*manifest.output_paths.predictions, *options.predictions);
    }
    result.status = RunStatus::ok;
  } catch (const InvalidOutputError& e) {
    result.status = RunStatus::invalid_output;
    result.reason = e.what();
    result.artifact.reset();
    result.predictions.reset();
  }
  return result;
}

}  // namespace stabx::runner
