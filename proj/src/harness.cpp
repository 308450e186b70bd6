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

#include "rfvi/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rfvi/errors.hpp"

namespace rfvi {

namespace {

using json = nlohmann::ordered_json;

// Strict reader over one JSON object: every key must be consumed, and
// every error names the dotted path of the field.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(field(key) + ": missing required field");
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key) + ": must be finite");
    return d;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::optional<std::uint64_t> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = raw(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(field(key) + ": expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, std::optional<bool> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(field(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::pair<double, double> range(const std::string& key, std::pair<double, double> def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(field(key) + ": expected [lo, hi]");
    }
    std::pair<double, double> r{v[0].get<double>(), v[1].get<double>()};
    if (!(r.first <= r.second)) throw ConfigError(field(key) + ": lo must not exceed hi");
    return r;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
    }
  }

 private:
  template <class T>
  T required(const std::string& key, const std::optional<T>& def) {
    seen_.insert(key);
    if (!def) throw ConfigError(field(key) + ": missing required field");
    return *def;
  }
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E>
E parse_enum(const std::string& value, const std::string& field, std::initializer_list<std::pair<const char*, E>> table) {
  for (const auto& [name, e] : table) {
    if (value == name) return e;
  }
  std::string allowed;
  for (const auto& [name, e] : table) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(field + ": unknown value '" + value + "' (expected one of " + allowed + ")");
}

Method parse_method(const std::string& v, const std::string& f) {
  return parse_enum<Method>(v, f, {{"korpelevich", Method::kKorpelevich}, {"popov", Method::kPopov}});
}

StepKind parse_step(const std::string& v, const std::string& f) {
  return parse_enum<StepKind>(v, f,
                              {{"constant", StepKind::kConstantHorizon},
                               {"diminishing", StepKind::kDiminishing},
                               {"parameter_free", StepKind::kParameterFree}});
}

Averaging parse_averaging(const std::string& v, const std::string& f) {
  return parse_enum<Averaging>(
      v, f, {{"alpha", Averaging::kAlpha}, {"inv_alpha", Averaging::kInverseAlpha}, {"uniform", Averaging::kUniform}});
}

SampleSchedule parse_schedule(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string rule = o.string("rule");
  SampleSchedule s;
  if (rule == "constant") {
    s = ConstantSamples{static_cast<int>(o.integer("n"))};
  } else if (rule == "root") {
    s = RootGrowth{o.number("r")};
  } else if (rule == "log") {
    s = LogGrowth{o.number("m")};
  } else if (rule == "max_const_root") {
    s = MaxConstRoot{static_cast<int>(o.integer("n")), o.number("r")};
  } else {
    throw ConfigError(o.field("rule") + ": unknown value '" + rule + "' (expected constant, root, log, max_const_root)");
  }
  o.finish();
  try {
    validate_schedule(s);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return s;
}

json schedule_json(const SampleSchedule& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantSamples>) return {{"rule", "constant"}, {"n", v.n}};
        if constexpr (std::is_same_v<T, RootGrowth>) return {{"rule", "root"}, {"r", v.r}};
        if constexpr (std::is_same_v<T, LogGrowth>) return {{"rule", "log"}, {"m", v.m}};
        if constexpr (std::is_same_v<T, MaxConstRoot>) return {{"rule", "max_const_root"}, {"n", v.n}, {"r", v.r}};
      },
      s);
}

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("write failed for " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InvalidInput("bad number '" + s + "'");
  }
  if (pos != s.size()) throw InvalidInput("bad number '" + s + "'");
  return v;
}

template <class T>
T parse_int(const std::string& s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidInput("bad integer '" + s + "'");
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

StepSchedule SolverBlock::step_schedule(double lipschitz) const {
  StepSchedule s;
  s.kind = step;
  s.alpha_bar = alpha_bar;
  if (cap && step != StepKind::kParameterFree) s.cap = StepSchedule::cap_from(w4, lipschitz);
  return s;
}

void ExperimentConfig::validate() const {
  const GameParameters& p = problem;
  if (p.player_dim < 1) throw ConfigError("problem.player_dim: must be >= 1");
  if (p.num_constraints < 1) throw ConfigError("problem.num_constraints: must be >= 1");
  if (p.a_eig_range.first < 0.0) throw ConfigError("problem.a_eig_range: eigenvalues must be nonnegative");
  if (p.b_eig_range.first < 0.0) throw ConfigError("problem.b_eig_range: eigenvalues must be nonnegative");
  if (!(p.noise_stddev >= 0.0)) throw ConfigError("problem.noise_stddev: must be nonnegative");
  if (!(p.box_half_width > 0.0)) throw ConfigError("problem.box_half_width: must be positive");
  if (!(feasibility.beta > 0.0 && feasibility.beta < 2.0)) {
    throw ConfigError("feasibility.beta: beta must lie in the open interval (0, 2)");
  }
  try {
    validate_schedule(feasibility.schedule);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("feasibility.schedule: ") + e.what());
  }
  if (solvers.empty()) throw ConfigError("solvers: at least one solver block is required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    const SolverBlock& b = solvers[i];
    const std::string f = "solvers[" + std::to_string(i) + "]";
    if (b.name.empty()) throw ConfigError(f + ".name: must be nonempty");
    if (b.name.find_first_of(",/\\ \"") != std::string::npos) {
      throw ConfigError(f + ".name: must not contain commas, slashes, quotes or spaces");
    }
    if (!names.insert(b.name).second) throw ConfigError(f + ".name: duplicate block name '" + b.name + "'");
    if (!(b.alpha_bar > 0.0)) throw ConfigError(f + ".alpha_bar: must be positive");
    if (!(b.w4 > 0.0 && b.w4 < 1.0)) throw ConfigError(f + ".w4: must lie in (0, 1)");
    if (b.horizon < 1) throw ConfigError(f + ".horizon: must be >= 1");
  }
  if (evaluation.cloud_candidates < 1) throw ConfigError("evaluation.cloud_candidates: must be >= 1");
  if (evaluation.cadence < 1) throw ConfigError("evaluation.cadence: must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds: list must not be empty");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw ConfigError("seeds: duplicate seed");
  if (output_dir.empty()) throw ConfigError("output_dir: must be nonempty");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not well-formed JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Obj top(root, "");

  {
    Obj o(top.raw("problem"), "problem");
    GameParameters& p = cfg.problem;
    const std::int64_t pd = o.integer("player_dim", p.player_dim);
    const std::int64_t nc = o.integer("num_constraints", static_cast<std::int64_t>(p.num_constraints));
    if (pd < 1) throw ConfigError("problem.player_dim: must be >= 1");
    if (nc < 1) throw ConfigError("problem.num_constraints: must be >= 1");
    p.player_dim = pd;
    p.num_constraints = static_cast<std::size_t>(nc);
    p.a_eig_range = o.range("a_eig_range", p.a_eig_range);
    p.b_eig_range = o.range("b_eig_range", p.b_eig_range);
    p.c_range = o.range("c_range", p.c_range);
    p.d_range = o.range("d_range", p.d_range);
    p.noise_stddev = o.number("noise_stddev", p.noise_stddev);
    p.box_half_width = o.number("box_half_width", p.box_half_width);
    cfg.problem_seed = o.unsigned_integer("seed", cfg.problem_seed);
    o.finish();
  }
  {
    Obj o(top.raw("feasibility"), "feasibility");
    cfg.feasibility.beta = o.number("beta", 1.0);
    if (o.has("schedule")) cfg.feasibility.schedule = parse_schedule(o.raw("schedule"), "feasibility.schedule");
    o.finish();
  }
  {
    const json& arr = top.raw("solvers");
    if (!arr.is_array()) throw ConfigError("solvers: expected a list");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "solvers[" + std::to_string(i) + "]";
      Obj o(arr[i], path);
      SolverBlock b;
      b.method = parse_method(o.string("method"), o.field("method"));
      b.name = o.string("name", std::string(to_string(b.method)));
      b.step = parse_step(o.string("step", "diminishing"), o.field("step"));
      b.alpha_bar = o.number("alpha_bar", b.alpha_bar);
      b.w4 = o.number("w4", b.w4);
      b.cap = o.boolean("cap", b.cap);
      const std::int64_t t = o.integer("horizon", b.horizon);
      if (t < 1 || t > std::numeric_limits<int>::max()) throw ConfigError(o.field("horizon") + ": must be >= 1");
      b.horizon = static_cast<int>(t);
      b.report_averaging = parse_averaging(o.string("report_averaging", "inv_alpha"), o.field("report_averaging"));
      if (o.has("schedule")) b.schedule = parse_schedule(o.raw("schedule"), o.field("schedule"));
      o.finish();
      cfg.solvers.push_back(std::move(b));
    }
  }
  if (top.has("evaluation")) {
    Obj o(top.raw("evaluation"), "evaluation");
    EvaluationBlock& e = cfg.evaluation;
    const std::int64_t cc = o.integer("cloud_candidates", static_cast<std::int64_t>(e.cloud_candidates));
    if (cc < 1) throw ConfigError("evaluation.cloud_candidates: must be >= 1");
    e.cloud_candidates = static_cast<std::size_t>(cc);
    const std::int64_t cad = o.integer("cadence", e.cadence);
    if (cad < 1 || cad > std::numeric_limits<int>::max()) throw ConfigError("evaluation.cadence: must be >= 1");
    e.cadence = static_cast<int>(cad);
    e.seed = o.unsigned_integer("seed", e.seed);
    e.record_wall_time = o.boolean("record_wall_time", e.record_wall_time);
    o.finish();
  }
  {
    const json& arr = top.raw("seeds");
    if (!arr.is_array()) throw ConfigError("seeds: expected a list");
    for (const auto& s : arr) {
      if (!s.is_number_unsigned()) throw ConfigError("seeds: entries must be nonnegative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  cfg.output_dir = top.string("output_dir", cfg.output_dir);
  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  const GameParameters& p = cfg.problem;
  auto rng = [](const std::pair<double, double>& r) { return json::array({r.first, r.second}); };
  json solvers = json::array();
  for (const auto& b : cfg.solvers) {
    json j = {{"name", b.name},
              {"method", to_string(b.method)},
              {"step", to_string(b.step)},
              {"alpha_bar", b.alpha_bar},
              {"w4", b.w4},
              {"cap", b.cap},
              {"horizon", b.horizon},
              {"report_averaging", to_string(b.report_averaging)}};
    if (b.schedule) j["schedule"] = schedule_json(*b.schedule);
    solvers.push_back(std::move(j));
  }
  json root = {
      {"problem",
       {{"player_dim", p.player_dim},
        {"num_constraints", p.num_constraints},
        {"a_eig_range", rng(p.a_eig_range)},
        {"b_eig_range", rng(p.b_eig_range)},
        {"c_range", rng(p.c_range)},
        {"d_range", rng(p.d_range)},
        {"noise_stddev", p.noise_stddev},
        {"box_half_width", p.box_half_width},
        {"seed", cfg.problem_seed}}},
      {"feasibility", {{"beta", cfg.feasibility.beta}, {"schedule", schedule_json(cfg.feasibility.schedule)}}},
      {"solvers", solvers},
      {"evaluation",
       {{"cloud_candidates", cfg.evaluation.cloud_candidates},
        {"cadence", cfg.evaluation.cadence},
        {"seed", cfg.evaluation.seed},
        {"record_wall_time", cfg.evaluation.record_wall_time}}},
      {"seeds", cfg.seeds},
      {"output_dir", cfg.output_dir}};
  return root.dump(2) + "\n";
}

ExperimentConfig zero_sum_default_config() {
  ExperimentConfig cfg;
  SolverBlock b;
  b.name = "korpelevich";
  cfg.solvers.push_back(b);
  cfg.seeds = {1, 2, 3, 4, 5};
  return cfg;
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  // The output directory does not change results and is left out.
  ExperimentConfig c = cfg;
  c.output_dir = "-";
  const std::string text = config_to_json(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ProblemSpec build_problem(const ExperimentConfig& cfg) {
  SeededStream rng(cfg.problem_seed, 0);
  return make_zero_sum_game(cfg.problem, rng);
}

RunRecord run_single(const ProblemSpec& spec, const GapEvaluator& gap, const ExperimentConfig& cfg,
                     const SolverBlock& block, std::uint64_t seed) {
  RunRecord rec;
  rec.block = block.name;
  rec.seed = seed;

  if (spec.players.size() != 2) throw InvalidInput("run_single: expected a two-player problem");
  const ConstraintFamily fam1 = spec.family.restricted_to_block(spec.players[0].offset);
  const ConstraintFamily fam2 = spec.family.restricted_to_block(spec.players[1].offset);

  SolverConfig sc;
  sc.method = block.method;
  sc.steps = block.step_schedule(spec.oracle.lipschitz);
  sc.averaging = block.report_averaging;
  sc.feas = cfg.feasibility;
  if (block.schedule) sc.feas.schedule = *block.schedule;
  sc.horizon = block.horizon;
  sc.master_seed = seed;
  sc.record_iterates = false;

  const int cadence = cfg.evaluation.cadence;
  const auto t0 = std::chrono::steady_clock::now();
  sc.observer = [&](const IterationRecord& it) {
    if (it.k % cadence != 0 && it.k != block.horizon) return;
    CsvRow row;
    row.iter = it.k;
    row.gap_alpha = gap(it.averages[0]).value;
    row.gap_invalpha = gap(it.averages[1]).value;
    row.gap_uniform = gap(it.averages[2]).value;
    const RealVec& rep = it.averages[static_cast<std::size_t>(block.report_averaging)];
    row.infeas_p1 = infeasibility_surrogate(rep, fam1);
    row.infeas_p2 = infeasibility_surrogate(rep, fam2);
    row.fresh_evals = it.fresh_evals;
    row.wall_ns = cfg.evaluation.record_wall_time ? elapsed_ns(t0) : 0;
    rec.rows.push_back(row);
  };
  const SolverTrace trace = run_solver(spec, sc);
  rec.total_wall_ns = elapsed_ns(t0);
  if (trace.fresh_evals != rec.rows.back().fresh_evals) throw InvalidInput("fresh-eval accounting mismatch");
  return rec;
}

std::vector<RunRecord> run_experiment_matrix(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string fp = config_fingerprint(cfg);
  const ProblemSpec spec = build_problem(cfg);
  SeededStream cloud_rng(cfg.evaluation.seed, 0);
  const FeasiblePointCloud cloud = sample_feasible_points(spec, cfg.evaluation.cloud_candidates, cloud_rng);
  const GapEvaluator gap(cloud, spec);

  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<RunRecord> records(cfg.solvers.size() * n_seeds);
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const SolverBlock& block = cfg.solvers[idx / n_seeds];
    const std::uint64_t seed = cfg.seeds[idx % n_seeds];
    RunRecord r;
    try {
      r = run_single(spec, gap, cfg, block, seed);
    } catch (const std::exception& e) {
      r = RunRecord{};
      r.block = block.name;
      r.seed = seed;
      r.error = e.what();
    }
    r.fingerprint = fp;
    records[idx] = std::move(r);
  }
  return records;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::map<int, std::vector<const CsvRow*>>> by_block;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    if (!by_block.count(r.block)) order.push_back(r.block);
    for (const auto& row : r.rows) by_block[r.block][row.iter].push_back(&row);
  }
  std::vector<AggregateRow> out;
  for (const auto& block : order) {
    for (const auto& [iter, rows] : by_block[block]) {
      AggregateRow a;
      a.block = block;
      a.iter = iter;
      a.runs = static_cast<int>(rows.size());
      for (std::size_t c = 0; c < kAggregateColumns.size(); ++c) {
        std::vector<double> vals;
        for (const CsvRow* r : rows) {
          const double v[] = {r->gap_alpha, r->gap_invalpha, r->gap_uniform,
                              r->infeas_p1, r->infeas_p2,    static_cast<double>(r->fresh_evals)};
          vals.push_back(v[c]);
        }
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        a.mean.push_back(mean);
        a.stddev.push_back(vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0);
      }
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string run_csv_filename(const RunRecord& r) { return r.block + "_seed" + std::to_string(r.seed) + ".csv"; }

std::string run_csv_text(const RunRecord& r) {
  std::string s = std::string(kCsvHeader) + "\n";
  for (const auto& row : r.rows) {
    s += std::to_string(row.iter) + "," + format_double(row.gap_alpha) + "," + format_double(row.gap_invalpha) + "," +
         format_double(row.gap_uniform) + "," + format_double(row.infeas_p1) + "," + format_double(row.infeas_p2) +
         "," + std::to_string(row.fresh_evals) + "," + std::to_string(row.wall_ns) + "\n";
  }
  return s;
}

std::vector<CsvRow> parse_run_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kCsvHeader) throw InvalidInput("run CSV: header mismatch");
  std::vector<CsvRow> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 8) throw InvalidInput("run CSV: line " + std::to_string(i + 1) + " has wrong field count");
    CsvRow r;
    r.iter = parse_int<int>(f[0]);
    r.gap_alpha = parse_double(f[1]);
    r.gap_invalpha = parse_double(f[2]);
    r.gap_uniform = parse_double(f[3]);
    r.infeas_p1 = parse_double(f[4]);
    r.infeas_p2 = parse_double(f[5]);
    r.fresh_evals = parse_int<std::uint64_t>(f[6]);
    r.wall_ns = parse_int<std::int64_t>(f[7]);
    out.push_back(r);
  }
  return out;
}

std::string aggregate_csv_text(const std::vector<AggregateRow>& rows) {
  std::string s = "block,iter,runs";
  for (const auto& c : kAggregateColumns) s += "," + c + "_mean," + c + "_std";
  s += "\n";
  for (const auto& r : rows) {
    s += r.block + "," + std::to_string(r.iter) + "," + std::to_string(r.runs);
    for (std::size_t c = 0; c < kAggregateColumns.size(); ++c) {
      s += "," + format_double(r.mean[c]) + "," + format_double(r.stddev[c]);
    }
    s += "\n";
  }
  return s;
}

std::vector<AggregateRow> parse_aggregate_csv(const std::string& text) {
  const auto lines = lines_of(text);
  std::string header = "block,iter,runs";
  for (const auto& c : kAggregateColumns) header += "," + c + "_mean," + c + "_std";
  if (lines.empty() || lines[0] != header) throw InvalidInput("aggregate CSV: header mismatch");
  std::vector<AggregateRow> out;
  const std::size_t nf = 3 + 2 * kAggregateColumns.size();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != nf) throw InvalidInput("aggregate CSV: line " + std::to_string(i + 1) + " has wrong field count");
    AggregateRow r;
    r.block = f[0];
    r.iter = parse_int<int>(f[1]);
    r.runs = parse_int<int>(f[2]);
    for (std::size_t c = 0; c < kAggregateColumns.size(); ++c) {
      r.mean.push_back(parse_double(f[3 + 2 * c]));
      r.stddev.push_back(parse_double(f[4 + 2 * c]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& dir) {
  if (records.empty()) throw InvalidInput("write_csv: no records");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& r : records) {
    if (r.ok()) write_text(dir / run_csv_filename(r), run_csv_text(r));
  }
  write_text(dir / "aggregate.csv", aggregate_csv_text(aggregate(records)));
}

std::string plot_svg_text(const std::vector<AggregateRow>& rows, const std::string& column) {
  if (rows.empty()) throw InvalidInput("plot: empty aggregate");
  const auto it = std::find(kAggregateColumns.begin(), kAggregateColumns.end(), column);
  if (it == kAggregateColumns.end()) throw InvalidInput("plot: unknown column '" + column + "'");
  const auto col = static_cast<std::size_t>(it - kAggregateColumns.begin());

  std::vector<std::string> blocks;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows) {
    if (!series.count(r.block)) blocks.push_back(r.block);
    auto& s = series[r.block];
    if (r.mean[col] > 0.0) s.emplace_back(r.iter, r.mean[col]);
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double lmin = xmin, lmax = -xmin;
  for (const auto& [name, pts] : series) {
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      lmin = std::min(lmin, std::log10(y));
      lmax = std::max(lmax, std::log10(y));
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    lmin = 0.0;
    lmax = 1.0;
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  lmin = std::floor(lmin);
  lmax = std::ceil(lmax);
  if (lmax == lmin) lmax = lmin + 1.0;

  const double W = 720, H = 480, L = 80, R = 200, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return T + (lmax - std::log10(y)) / (lmax - lmin) * ph; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << column
    << " (mean over runs)</text>\n";
  s << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph << "\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph << "\"/>\n";
  s << "</g>\n<g class=\"ticks\">\n";
  for (double e = lmin; e <= lmax; e += 1.0) {
    const double y = T + (lmax - e) / (lmax - lmin) * ph;
    s << "<line x1=\"" << L - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << L << "\" y2=\"" << num(y)
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << L - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << static_cast<int>(e)
      << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    s << "<text x=\"" << num(px(xv)) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">"
      << static_cast<long long>(std::llround(xv)) << "</text>\n";
  }
  s << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">iteration</text>\n";
  s << "</g>\n";

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& pts = series[blocks[b]];
    const char* color = palette[b % (sizeof palette / sizeof palette[0])];
    s << "<g class=\"series\" data-block=\"" << blocks[b] << "\">\n";
    if (pts.size() > 1) {
      s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        s << (i ? " " : "") << num(px(pts[i].first)) << "," << num(py(pts[i].second));
      }
      s << "\"/>\n";
    }
    for (const auto& [x, y] : pts) {
      s << "<circle class=\"marker\" cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\" fill=\""
        << color << "\"/>\n";
    }
    s << "</g>\n";
    const double ly = T + 10 + 20.0 * static_cast<double>(b);
    s << "<g class=\"legend\"><line x1=\"" << L + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 35
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << L + pw + 40
      << "\" y=\"" << ly + 4 << "\">" << blocks[b] << "</text></g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_plot_svg(const std::vector<AggregateRow>& rows, const std::string& column,
                   const std::filesystem::path& path) {
  write_text(path, plot_svg_text(rows, column));
}

std::vector<std::filesystem::path> emit_standard_plots(const std::vector<AggregateRow>& rows,
                                                       const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const char* col : {"gap_invalpha", "infeas_p1", "infeas_p2"}) {
    out.push_back(dir / (std::string(col) + ".svg"));
    emit_plot_svg(rows, col, out.back());
  }
  return out;
}

ExperimentConfig zero_sum_study_config(int seed_count, std::uint64_t first_seed) {
  if (seed_count < 1) throw ConfigError("seeds: seed count must be >= 1");
  ExperimentConfig cfg = zero_sum_default_config();
  cfg.solvers.clear();
  for (const auto& [label, sched] : {std::pair<const char*, SampleSchedule>{"sqrt", RootGrowth{2.0}},
                                     std::pair<const char*, SampleSchedule>{"cbrt", RootGrowth{3.0}}}) {
    SolverBlock k;
    k.name = std::string("korpelevich_") + label;
    k.method = Method::kKorpelevich;
    k.step = StepKind::kDiminishing;
    k.schedule = sched;
    cfg.solvers.push_back(k);

    SolverBlock p;
    p.name = std::string("popov_") + label;
    p.method = Method::kPopov;
    p.step = StepKind::kParameterFree;
    p.cap = false;
    p.schedule = sched;
    cfg.solvers.push_back(p);
  }
  cfg.seeds.clear();
  for (int i = 0; i < seed_count; ++i) cfg.seeds.push_back(first_seed + static_cast<std::uint64_t>(i));
  return cfg;
}

StudySummary replicate_zero_sum_study(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  StudySummary sum;
  sum.records = run_experiment_matrix(cfg);
  for (const auto& r : sum.records) sum.failed_runs += r.ok() ? 0 : 1;
  write_csv(sum.records, out_dir);
  const auto agg = aggregate(sum.records);
  if (!agg.empty()) emit_standard_plots(agg, out_dir);

  std::map<std::string, std::vector<const AggregateRow*>> by_block;
  for (const auto& a : agg) by_block[a.block].push_back(&a);
  for (const auto& b : cfg.solvers) {
    const auto it = by_block.find(b.name);
    if (it == by_block.end()) continue;
    const AggregateRow& last = *it->second.back();
    StudyEntry e{};
    e.block = b.name;
    for (int m = 0; m < 3; ++m) e.final_gap[m] = last.mean[static_cast<std::size_t>(m)];
    e.final_infeas_p1 = last.mean[3];
    e.final_infeas_p2 = last.mean[4];
    std::vector<double> ks, gs;
    for (const AggregateRow* a : it->second) {
      if (a->mean[1] > 0.0) {
        ks.push_back(a->iter);
        gs.push_back(a->mean[1]);
      }
    }
    e.gap_invalpha_slope = ks.size() >= 3 ? fit_loglog_rate(ks, gs) : std::numeric_limits<double>::quiet_NaN();
    sum.entries.push_back(e);
  }
  const StudyEntry* ks = nullptr;
  const StudyEntry* kc = nullptr;
  for (const auto& e : sum.entries) {
    if (e.block == "korpelevich_sqrt") ks = &e;
    if (e.block == "korpelevich_cbrt") kc = &e;
  }
  sum.sqrt_beats_cbrt = ks && kc && ks->final_gap[1] <= kc->final_gap[1];
  write_text(out_dir / "summary.json", summary_json(sum));
  return sum;
}

StudySummary replicate_zero_sum_study(int seed_count, const std::filesystem::path& out_dir) {
  return replicate_zero_sum_study(zero_sum_study_config(seed_count), out_dir);
}

std::string summary_json(const StudySummary& s) {
  auto num = [](double v) -> json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  json entries = json::array();
  for (const auto& e : s.entries) {
    entries.push_back({{"block", e.block},
                       {"final_gap_alpha", num(e.final_gap[0])},
                       {"final_gap_invalpha", num(e.final_gap[1])},
                       {"final_gap_uniform", num(e.final_gap[2])},
                       {"final_infeas_p1", num(e.final_infeas_p1)},
                       {"final_infeas_p2", num(e.final_infeas_p2)},
                       {"gap_invalpha_loglog_slope", num(e.gap_invalpha_slope)}});
  }
  json failures = json::array();
  for (const auto& r : s.records) {
    if (!r.ok()) failures.push_back({{"block", r.block}, {"seed", r.seed}, {"error", *r.error}});
  }
  json root = {{"configurations", entries},
               {"failed_runs", failures},
               {"korpelevich_sqrt_final_gap_le_cbrt", s.sqrt_beats_cbrt}};
  return root.dump(2) + "\n";
}

}  // namespace rfvi
