// Copyright 2026 The rfvi Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment runner: JSON config ingestion, the (solver block x seed) run
// matrix, CSV and SVG emission, and the zero-sum game study.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rfvi/metrics.hpp"
#include "rfvi/problem.hpp"
#include "rfvi/solvers.hpp"

namespace rfvi {

struct SolverBlock {
  std::string name;
  Method method = Method::kKorpelevich;
  StepKind step = StepKind::kDiminishing;
  double alpha_bar = 0.3;
  double w4 = 0.1;
  bool cap = true;  // ignored for the parameter-free rule
  int horizon = 5000;
  Averaging report_averaging = Averaging::kInverseAlpha;
  std::optional<SampleSchedule> schedule;  // overrides the feasibility block

  // Resolves the step schedule against the problem's Lipschitz constant.
  StepSchedule step_schedule(double lipschitz) const;
};

struct EvaluationBlock {
  std::size_t cloud_candidates = kDefaultCloudCandidates;
  int cadence = 50;
  std::uint64_t seed = 20260101;
  bool record_wall_time = false;  // wall_ns column is 0 when off
};

struct ExperimentConfig {
  GameParameters problem;
  std::uint64_t problem_seed = 7;
  FeasibilityConfig feasibility;
  std::vector<SolverBlock> solvers;
  EvaluationBlock evaluation;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";

  // Throws ConfigError naming the offending field.
  void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

// Game size n=2 per player, 1000 constraints, alpha_bar 0.3, w4 0.1, seeds 1..5,
// T = 5000, one Korpelevich block.
ExperimentConfig zero_sum_default_config();

struct CsvRow {
  int iter = 0;
  double gap_alpha = 0.0;
  double gap_invalpha = 0.0;
  double gap_uniform = 0.0;
  double infeas_p1 = 0.0;
  double infeas_p2 = 0.0;
  std::uint64_t fresh_evals = 0;
  std::int64_t wall_ns = 0;

  bool operator==(const CsvRow&) const = default;
};

inline constexpr const char* kCsvHeader = "iter,gap_alpha,gap_invalpha,gap_uniform,infeas_p1,infeas_p2,fresh_evals,wall_ns";

struct RunRecord {
  std::string fingerprint;  // FNV-1a of the canonical config text
  std::string block;
  std::uint64_t seed = 0;
  std::vector<CsvRow> rows;
  std::int64_t total_wall_ns = 0;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

std::string config_fingerprint(const ExperimentConfig& cfg);

// Builds the game of the problem block.
ProblemSpec build_problem(const ExperimentConfig& cfg);

// Runs one solver block at one seed and samples the cadence rows.
RunRecord run_single(const ProblemSpec& spec, const GapEvaluator& gap, const ExperimentConfig& cfg,
                     const SolverBlock& block, std::uint64_t seed);

// One record per (solver block, seed), in config order. Failed runs carry
// `error` and no rows.
std::vector<RunRecord> run_experiment_matrix(const ExperimentConfig& cfg);

struct AggregateRow {
  std::string block;
  int iter = 0;
  int runs = 0;
  std::vector<double> mean;  // one per aggregate column
  std::vector<double> stddev;
};

inline const std::vector<std::string> kAggregateColumns = {"gap_alpha", "gap_invalpha", "gap_uniform",
                                                           "infeas_p1", "infeas_p2", "fresh_evals"};

// Per-block, per-iteration mean and sample standard deviation over the
// successful runs.
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records);

std::string format_double(double v);  // 17 significant digits
std::string run_csv_filename(const RunRecord& r);
std::string run_csv_text(const RunRecord& r);
std::vector<CsvRow> parse_run_csv(const std::string& text);
std::string aggregate_csv_text(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> parse_aggregate_csv(const std::string& text);

// Writes one CSV per successful record plus aggregate.csv into `dir`.
void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& dir);

// One series per block of the named aggregate column against iteration,
// log-scaled y; non-positive values are skipped.
std::string plot_svg_text(const std::vector<AggregateRow>& rows, const std::string& column);
void emit_plot_svg(const std::vector<AggregateRow>& rows, const std::string& column,
                   const std::filesystem::path& path);
// gap_invalpha.svg, infeas_p1.svg and infeas_p2.svg next to each other.
std::vector<std::filesystem::path> emit_standard_plots(const std::vector<AggregateRow>& rows,
                                                       const std::filesystem::path& dir);

struct StudyEntry {
  std::string block;
  double final_gap[3];
  double final_infeas_p1;
  double final_infeas_p2;
  double gap_invalpha_slope;  // NaN when fewer than three positive points
};

struct StudySummary {
  std::vector<StudyEntry> entries;
  std::vector<RunRecord> records;
  int failed_runs = 0;
  bool sqrt_beats_cbrt = false;  // Korpelevich, inverse-alpha averaging
};

// Korpelevich (diminishing, capped) and Popov (parameter-free) with
// N_k = ceil(sqrt k) and ceil(cbrt k), seeds first_seed..first_seed+seed_count-1.
ExperimentConfig zero_sum_study_config(int seed_count, std::uint64_t first_seed = 1);
StudySummary replicate_zero_sum_study(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
StudySummary replicate_zero_sum_study(int seed_count, const std::filesystem::path& out_dir);
std::string summary_json(const StudySummary& s);

}  // namespace rfvi
