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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rfvi/errors.hpp"
#include "rfvi/harness.hpp"
#include "rfvi/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRun = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> cadence;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed (replaces the configured seed list)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--cadence", o.cadence, "Gap evaluation cadence in iterations");
}

void apply(const Overrides& o, rfvi::ExperimentConfig& cfg) {
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.out) cfg.output_dir = *o.out;
  if (o.cadence) cfg.evaluation.cadence = *o.cadence;
  cfg.validate();
}

void print_runs(const std::vector<rfvi::RunRecord>& records) {
  for (const auto& r : records) {
    if (r.ok()) {
      const auto& last = r.rows.back();
      std::printf("%-20s seed %-6llu iters %-6d gap_invalpha %.6g infeas_p1 %.6g infeas_p2 %.6g  %.3f s\n",
                  r.block.c_str(), static_cast<unsigned long long>(r.seed), last.iter, last.gap_invalpha,
                  last.infeas_p1, last.infeas_p2, static_cast<double>(r.total_wall_ns) * 1e-9);
    } else {
      std::printf("%-20s seed %-6llu FAILED: %s\n", r.block.c_str(), static_cast<unsigned long long>(r.seed),
                  r.error->c_str());
    }
  }
}

int count_failures(const std::vector<rfvi::RunRecord>& records) {
  int n = 0;
  for (const auto& r : records) n += r.ok() ? 0 : 1;
  return n;
}

int cmd_run(const std::string& path, const Overrides& o) {
  rfvi::ExperimentConfig cfg = rfvi::parse_config(path);
  apply(o, cfg);
  const auto records = rfvi::run_experiment_matrix(cfg);
  print_runs(records);
  const int failed = count_failures(records);
  if (failed == static_cast<int>(records.size())) {
    std::fprintf(stderr, "all runs failed\n");
    return kExitRun;
  }
  rfvi::write_csv(records, cfg.output_dir);
  rfvi::emit_standard_plots(rfvi::aggregate(records), cfg.output_dir);
  std::printf("wrote %s\n", cfg.output_dir.c_str());
  return failed ? kExitRun : kExitOk;
}

int cmd_replicate(int seeds, const Overrides& o) {
  rfvi::ExperimentConfig cfg = rfvi::zero_sum_study_config(seeds, o.seed.value_or(1));
  cfg.output_dir = o.out.value_or("zero_sum_study");
  if (o.cadence) cfg.evaluation.cadence = *o.cadence;
  cfg.validate();
  const rfvi::StudySummary s = rfvi::replicate_zero_sum_study(cfg, cfg.output_dir);
  print_runs(s.records);
  for (const auto& e : s.entries) {
    std::printf("%-20s final gap alpha %.6g inv_alpha %.6g uniform %.6g  slope(inv_alpha) %.3f\n", e.block.c_str(),
                e.final_gap[0], e.final_gap[1], e.final_gap[2], e.gap_invalpha_slope);
  }
  std::printf("korpelevich sqrt-rule final gap <= cbrt-rule: %s\n", s.sqrt_beats_cbrt ? "yes" : "no");
  std::printf("wrote %s\n", cfg.output_dir.c_str());
  return s.failed_runs ? kExitRun : kExitOk;
}

int cmd_verify(const Overrides& o) {
  const auto results = rfvi::verify::run_verification_suite(o.seed.value_or(20260101));
  const std::string report = rfvi::verify::report_json(results);
  bool all = true;
  for (const auto& r : results) {
    std::printf("%-32s %s  measured %.6g  threshold %.6g\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.measured,
                r.threshold);
    all = all && r.passed;
  }
  if (o.out) {
    std::filesystem::create_directories(*o.out);
    std::ofstream(std::filesystem::path(*o.out) / "verify.json") << report << "\n";
  } else {
    std::cout << report << "\n";
  }
  return all ? kExitOk : kExitRun;
}

int cmd_plot(const std::string& path, const Overrides& o) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw rfvi::ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  const auto rows = rfvi::parse_aggregate_csv(ss.str());
  const std::filesystem::path dir = o.out ? std::filesystem::path(*o.out) : std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  for (const auto& p : rfvi::emit_standard_plots(rows, dir.empty() ? "." : dir)) std::printf("wrote %s\n", p.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic variational inequality solver with randomized feasibility steps"};
  app.require_subcommand(1);

  Overrides run_o, rep_o, ver_o, plot_o;
  std::string config_path, aggregate_path;
  int seeds = 5;

  auto* run = app.add_subcommand("run", "Run the experiment matrix of a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  add_overrides(run, run_o);

  auto* rep = app.add_subcommand("replicate-sec7", "Run the constrained zero-sum game study");
  rep->add_option("--seeds", seeds, "Seeds per configuration")->check(CLI::PositiveNumber);
  add_overrides(rep, rep_o);

  auto* ver = app.add_subcommand("verify", "Run the independent oracle and inequality checks");
  add_overrides(ver, ver_o);

  auto* plot = app.add_subcommand("plot", "Render SVG plots from an aggregate CSV");
  plot->add_option("aggregate", aggregate_path, "aggregate.csv")->required();
  add_overrides(plot, plot_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, run_o);
    if (*rep) return cmd_replicate(seeds, rep_o);
    if (*ver) return cmd_verify(ver_o);
    if (*plot) return cmd_plot(aggregate_path, plot_o);
  } catch (const rfvi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRun;
  }
  return kExitConfig;
}
