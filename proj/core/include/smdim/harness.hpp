#pragma once

#include "smdim/estimators.hpp"
#include "smdim/system.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace smdim {

struct ExperimentPlan {
  std::vector<double> amplitudes{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1};  ///< deg
  std::vector<ExplorationMode> modes{ExplorationMode::AgentOnly, ExplorationMode::EnvironmentOnly,
                                     ExplorationMode::Both};
  std::vector<Method> methods{Method::Linear, Method::CCA, Method::CCABootInfinitesimal,
                              Method::CCABootFinite};
  int trials = 20;
  int samples = 1000;  ///< N, movements per exploration
  int p_max = 15;
  int n_sources = 3;
  int boot_iterations = 10;
  std::uint64_t master_seed = 0;

  static constexpr int kPaperTrials = 100;

  void validate() const;
};

/// Reads the JSON plan format (same field names as ExperimentPlan, modes and
/// methods as their CLI spellings). Absent fields keep the values of `base`.
ExperimentPlan plan_from_json(const std::string& text, ExperimentPlan base = {});
std::string plan_to_json(const ExperimentPlan& plan);

/// 9 for AgentOnly, 2 n_s for EnvironmentOnly, 9 + 2 n_s - 3 for Both.
int ground_truth(ExplorationMode mode, int n_sources);

/// "m", "e" or "b".
std::string_view quantity_name(ExplorationMode mode);

/// Coordinates of one work item.
struct TrialCell {
  int amplitude_index = 0;
  ExplorationMode mode = ExplorationMode::AgentOnly;
  Method method = Method::Linear;
  int trial = 0;
};

struct TrialRecord {
  TrialCell cell;
  double amplitude = 0.0;
  int estimate = 0;  ///< 0 when the trial failed
  int truth = 0;
  bool correct = false;
  double wall_seconds = 0.0;
  std::string error;                 ///< empty on success
  std::vector<double> diagnostics;   ///< spectrum or cost profile
};

/// Every cell of the plan, ordered by amplitude, mode, method, trial.
std::vector<TrialCell> plan_cells(const ExperimentPlan& plan);

/// Seed of the System shared by every mode and method of (amplitude, trial).
std::uint64_t system_seed(const ExperimentPlan& plan, int amplitude_index, int trial);
std::uint64_t trial_seed(const ExperimentPlan& plan, const TrialCell& cell);

/// Runs one cell in isolation. Failures are captured in the record.
TrialRecord run_trial(const ExperimentPlan& plan, const TrialCell& cell);

struct RunOptions {
  int threads = 1;  ///< 0 picks the hardware concurrency
  std::function<void(const TrialRecord&, std::size_t done, std::size_t total)> on_record;
};

/// All cells of the plan, in plan_cells order regardless of thread count.
std::vector<TrialRecord> run_experiment(const ExperimentPlan& plan, const RunOptions& options = {});

/// A chosen subset of cells, seeded exactly as in the full plan. Output order follows `cells`.
std::vector<TrialRecord> run_cells(const ExperimentPlan& plan, const std::vector<TrialCell>& cells,
                                   const RunOptions& options = {});

/// One JSON object per line. Wall time is left out unless asked for so that
/// reruns produce identical bytes.
std::string record_to_json(const TrialRecord& record, bool with_timing = false);
TrialRecord record_from_json(const std::string& line);
std::string records_to_jsonl(const std::vector<TrialRecord>& records, bool with_timing = false);
std::vector<TrialRecord> records_from_jsonl(const std::string& text);

struct SummaryRow {
  double amplitude = 0.0;
  std::string quantity;  ///< m, e, b, or d for the derived displacement dimension
  Method method = Method::Linear;
  int trials = 0;
  int correct = 0;
  double percent = 0.0;
  int dimension = 0;     ///< ground truth, or d = e + m - b
};

struct PerformanceTable {
  std::vector<SummaryRow> rows;
};

/// Percent correct per (amplitude, mode, method). A d row counts the trials
/// whose m, e and b estimates are all correct. Groups without records are
/// omitted.
PerformanceTable summarize(const std::vector<TrialRecord>& records);

std::string table_to_csv(const PerformanceTable& table);
std::string table_to_json(const PerformanceTable& table);
PerformanceTable table_from_csv(const std::string& text);

/// CSV (amplitude plus one column per method) and SVG chart for every
/// quantity in the table, written as plot_<q>.csv / plot_<q>.svg. Returns
/// the written paths. Throws ValidationError on an empty table.
std::vector<std::filesystem::path> emit_plot_data(const PerformanceTable& table,
                                                  const std::filesystem::path& dir);

/// CSV body of one quantity's plot file.
std::string plot_csv(const PerformanceTable& table, const std::string& quantity);
std::string plot_svg(const PerformanceTable& table, const std::string& quantity);

} // namespace smdim
