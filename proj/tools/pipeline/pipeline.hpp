#pragma once

#include "config.hpp"

#include "aperio/delone.hpp"
#include "aperio/operator.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace aperio::tools {

enum ExitCode { exit_ok = 0, exit_numerical = 1, exit_config = 2 };

/// Serializes all file output and records a content hash per file.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  /// Writes root/relative and returns the SHA-256 of the contents.
  std::string write(const std::string& relative, const std::string& contents);
  void write_json(const std::string& relative, const nlohmann::json& j);
  nlohmann::json file_list() const;

 private:
  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> files_;
};

struct TaskOutcome {
  std::string task;
  nlohmann::json report;
  bool ok = true;  // false: tolerance breach
  std::optional<double> value;
  std::optional<double> deviation;
  double runtime_s = 0;
};

struct RunResult {
  std::vector<TaskOutcome> tasks;
  int exit_code = exit_ok;
  nlohmann::json error;  // null unless a task raised
};

/// Seeds derived from the top-level seed.
std::uint64_t lattice_seed(const ExperimentConfig& c);
std::uint64_t task_seed(const ExperimentConfig& c, std::uint64_t stream);

DeloneSet make_lattice(const ExperimentConfig& c);
/// `open` drops any configured period.
OperatorSample make_model(const ExperimentConfig& c, const DeloneSet& set, bool open = false);

/// Runs the configured tasks in order, writing reports below `prefix` of the
/// writer root. Stops at the first task that raises.
RunResult run_tasks(const ExperimentConfig& c, ArtifactWriter& out, const std::string& prefix = "");

/// Full `run`: reports, config copy, error record and manifest.
RunResult run(const ExperimentConfig& c, const std::filesystem::path& out_dir);

/// Writes lattice.json and points.csv plus a manifest.
int generate(const ExperimentConfig& c, const std::filesystem::path& out_dir);

struct SweepRow {
  double value = 0;
  std::string task;
  std::optional<double> invariant;
  std::optional<double> deviation;
  double runtime_s = 0;
  int exit_code = 0;
};

/// Runs the pipeline once per value of the numeric key at `axis` (JSON
/// pointer), `threads` points at a time, and writes sweep.csv.
std::vector<SweepRow> sweep(const nlohmann::json& config, const std::string& axis, const std::vector<double>& values,
                            const std::filesystem::path& out_dir, int threads, int* exit_code = nullptr);

/// Plot-ready CSV files for every report found below `reports`.
std::vector<std::string> export_plotdata(const std::filesystem::path& reports, const std::filesystem::path& out_dir);

/// {"error": message, "key": pointer or null, "exit_code": n}
nlohmann::json error_record(const std::string& message, const std::string& key, int code);

}  // namespace aperio::tools
