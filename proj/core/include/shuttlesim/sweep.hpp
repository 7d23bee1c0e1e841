#pragma once

#include "shuttlesim/config.hpp"
#include "shuttlesim/disorder.hpp"
#include "shuttlesim/electrostatics.hpp"
#include "shuttlesim/lindblad.hpp"
#include "shuttlesim/transfer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace shuttlesim {

// ---------------------------------------------------------------------------
// Experiment orchestration: expand a config into a parameter grid, fan the
// realizations over a worker pool, and emit CSV records plus a JSON summary.
// Output order is the deterministic grid order regardless of worker count.
// ---------------------------------------------------------------------------

enum class ExperimentKind {
  GenLandscape,
  TransferSweep,
  MovingSweep,
  Leakage2D,
  ElectroWindow,
};

ExperimentKind experiment_kind_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::TransferSweep;
  std::uint64_t master_seed = 1;
  int n_realizations = 1;
  int jobs = 1;
  std::string out_path = "results.csv";

  // interchannel transfer (paused and moving)
  std::vector<double> eps0 = {500.0};     // ueV
  std::vector<double> t0 = {100.0};       // ueV
  std::vector<double> tau_tot = {10.0};   // ns
  double settle = 5.0;                    // ns
  double sigma_delta = 56.4;              // ueV
  // moving mode
  std::vector<double> velocity = {1.0};   // m/s
  bool correlated = true;
  double sigma_eps = 1000.0;              // ueV
  double l_dot = 14.0;                    // nm
  double pitch = 70.0;                    // nm
  double channel_separation = 100.0;      // nm

  // 2D shuttle leakage
  std::vector<double> shuttle_t0 = {1e-6}; // ueV
  double shuttle_velocity = 10.0;          // m/s
  double distance = 10000.0;               // nm
  double shuttle_pitch = 50.0;             // nm
  double shuttle_sigma_t = -1.0;           // ueV, negative: t0/10

  // electrostatics window
  std::vector<double> win_pitches = {30.0, 40.0, 50.0, 60.0, 70.0};
  std::vector<double> win_v_amps = {40.0, 70.0, 100.0, 130.0, 160.0};
  WindowThresholds thresholds;

  // landscape generation
  LandscapeConfig landscape;

  // Reads "experiment.*" keys plus the kind-specific section. Unknown keys
  // are rejected to catch typos.
  static ExperimentConfig from_config(const Config& cfg);
  void validate() const;
};

struct RunSummary {
  std::string csv_path;
  std::string summary_path;
  long n_records = 0;
  long n_failed = 0;
  double wall_seconds = 0.0;
};

// Runs the experiment, writes `<out>.csv` records in grid order and a JSON
// summary next to it. Per-realization failures become error records; the
// files are always complete.
RunSummary run_experiment(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Aggregation of sweep CSVs
// ---------------------------------------------------------------------------

struct AggregateRow {
  std::vector<std::string> group;   // values of the grouping columns, in order
  int n = 0;
  int n_success = 0;
  double p_suc = 0.0;
  double stderr_binomial = 0.0;
  double mean_value = 0.0;          // fidelity or leakage
  double stderr_value = 0.0;
};

struct SummarizeResult {
  std::vector<std::string> group_columns;
  std::string value_column;  // "fidelity" or "leakage"
  std::vector<AggregateRow> rows;
  std::vector<std::string> warnings; // malformed rows, with line numbers
};

// Groups records by every column left of "draw" and aggregates success
// fraction and the value column. Malformed rows are skipped and reported.
SummarizeResult summarize(const std::string& csv_path);

std::string summary_table_csv(const SummarizeResult& result);

} // namespace shuttlesim
