#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "athena/assumption.hpp"
#include "athena/fitness.hpp"
#include "athena/rank_sum.hpp"
#include "athena/search.hpp"

namespace athena::harness {

/// automatic: p = 1; manual: p = 0; athena: p (default 0.5) or a schedule.
enum class Mode { Automatic, Manual, Athena };
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

/// A falsification problem: plant, requirement, manual term and search box.
struct Problem {
  std::string id;
  std::string plant;
  std::string formula;
  std::string manual;
  Assumption assumption;
  double auto_scale = 1.0;
  double horizon = 0.0;

  /// Checks that everything parses and fits the plant. Throws on the first
  /// problem.
  void validate() const;
};

Problem from_catalog(std::string_view id);

struct ExperimentConfig {
  Problem problem;
  Mode mode = Mode::Athena;
  /// Weight used in athena mode when no schedule is given.
  double p = 0.5;
  std::optional<fitness::PSchedule> schedule;
  std::size_t repetitions = 50;
  std::uint64_t base_seed = 0;
  search::SearchConfig search;
  double dt = 0.01;
  double threshold = 0.0;

  void validate() const;
  /// p as applied by the mode (schedule excluded).
  double static_p() const;
  fitness::FitnessAssessment assessment() const;
  TimeGrid grid() const;
};

struct RunSummary {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool failure_found = false;
  std::size_t iterations_used = 0;
  double best_combined = 0.0;
  double best_robustness = 0.0;
  /// Set when the run aborted; the run then counts as no failure found.
  std::optional<std::string> error;
  double wall_seconds = 0.0;
};

struct IterationStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single run.
  double stddev = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RunSummary> runs;
  /// 100 * failure-revealing runs / repetitions.
  double percentage = 0.0;
  /// Over failure-revealing runs only; absent when there are none.
  std::optional<IterationStats> iterations;
  double wall_seconds = 0.0;
};

/// Jobs to use when none is requested: ATHENA_JOBS if set and positive, else 1.
std::size_t default_jobs();

/// Runs cfg.repetitions seeded searches (seed = base_seed + index) on up to
/// `jobs` threads. Rows are ordered by index regardless of completion order.
ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 0);

std::optional<IterationStats> iteration_stats(const std::vector<RunSummary>& runs);

/// With `timestamp` false, wall-clock fields are left out so equal configs
/// give byte-identical output.
nlohmann::ordered_json report_json(const ExperimentReport& report, bool timestamp);
std::string report_csv(const ExperimentReport& report);
/// Writes <stem>.json and <stem>.csv.
void write_report(const ExperimentReport& report, const std::filesystem::path& stem,
                  bool timestamp);

/// Per-run rows and headline figures read back from a report file.
struct ReportDigest {
  std::string requirement;
  std::string mode;
  double percentage = 0.0;
  std::vector<RunSummary> runs;
};
ReportDigest read_report(const std::filesystem::path& path);

struct Comparison {
  double percentage_a = 0.0;
  double percentage_b = 0.0;
  /// Rank-sum over the iteration counts of failure-revealing runs; absent
  /// when either side has none.
  std::optional<stats::RankSumResult> iterations;
};
Comparison compare(const ReportDigest& a, const ReportDigest& b);
nlohmann::ordered_json comparison_json(const Comparison& c);

/// A bench configuration file expands into one experiment per
/// (requirement, mode) pair. See README for the schema.
struct Suite {
  std::string name;
  std::vector<ExperimentConfig> experiments;
  std::filesystem::path output_dir;
};
Suite parse_suite(const nlohmann::json& doc);
Suite load_suite(const std::filesystem::path& path);

/// Report file stem for an experiment, e.g. "CC1_athena".
std::string report_stem(const ExperimentConfig& cfg);

}  // namespace athena::harness
