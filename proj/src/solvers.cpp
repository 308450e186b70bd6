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

#include "rfvi/solvers.hpp"

#include <cmath>
#include <limits>

#include "rfvi/errors.hpp"

namespace rfvi {

namespace {

enum StreamId : std::uint64_t { kInitStream = 0, kNoiseStream = 1, kConstraintStream = 2 };

double error_sq(const ProblemSpec& spec, const RealVec& at, const RealVec& fhat) {
  return (map_mean(spec, at) - fhat).squaredNorm();
}

}  // namespace

std::optional<double> StepSchedule::cap_from(double w4, double lipschitz) {
  if (!(w4 > 0.0 && w4 < 1.0)) throw ConfigError("w4 must lie in (0, 1)");
  if (!(lipschitz >= 0.0)) throw ConfigError("Lipschitz constant must be nonnegative");
  if (lipschitz == 0.0) return std::nullopt;
  return std::sqrt(1.0 - w4) / (std::sqrt(2.0) * lipschitz);
}

void StepSchedule::validate() const {
  if (!(alpha_bar > 0.0) || !std::isfinite(alpha_bar)) throw ConfigError("alpha_bar must be positive");
  if (cap && !(*cap > 0.0)) throw ConfigError("step cap must be positive");
}

double step_size_at(const StepSchedule& s, long long k, long long horizon) {
  if (k < 1 || k > horizon) throw InvalidInput("step_size_at: k outside [1, T]");
  double a = 0.0;
  switch (s.kind) {
    case StepKind::kConstantHorizon:
      a = s.alpha_bar / std::sqrt(static_cast<double>(horizon));
      break;
    case StepKind::kDiminishing:
    case StepKind::kParameterFree:
      a = s.alpha_bar / std::sqrt(static_cast<double>(k + 1));
      break;
  }
  if (s.cap && s.kind != StepKind::kParameterFree) a = std::min(a, *s.cap);
  return a;
}

std::string_view to_string(Method m) {
  return m == Method::kKorpelevich ? "korpelevich" : "popov";
}

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::kConstantHorizon:
      return "constant";
    case StepKind::kDiminishing:
      return "diminishing";
    case StepKind::kParameterFree:
      return "parameter_free";
  }
  return "?";
}

std::string_view to_string(Averaging a) {
  switch (a) {
    case Averaging::kAlpha:
      return "alpha";
    case Averaging::kInverseAlpha:
      return "inv_alpha";
    case Averaging::kUniform:
      return "uniform";
  }
  return "?";
}

double averaging_weight(Averaging mode, double alpha) {
  switch (mode) {
    case Averaging::kAlpha:
      return alpha;
    case Averaging::kInverseAlpha:
      return 1.0 / alpha;
    case Averaging::kUniform:
      return 1.0;
  }
  return 1.0;
}

void SolverConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon T must be >= 1");
  steps.validate();
  feas.validate();
}

RealVec StochasticOracle::sample(const RealVec& x) {
  ++calls_;
  return map_sample(spec_, x, rng_);
}

KorpelevichStep korpelevich_step(const RealVec& x_prev, double alpha, StochasticOracle& oracle) {
  const BoxSet& box = oracle.spec().base_set;
  KorpelevichStep s;
  s.fhat_x = oracle.sample(x_prev);
  s.u = project_box(x_prev - alpha * s.fhat_x, box);
  s.fhat_u = oracle.sample(s.u);
  s.v = project_box(x_prev - alpha * s.fhat_u, box);
  return s;
}

PopovStep popov_step(const RealVec& x_prev, const RealVec& fhat_old, double alpha, StochasticOracle& oracle) {
  const BoxSet& box = oracle.spec().base_set;
  PopovStep s;
  s.u = project_box(x_prev - alpha * fhat_old, box);
  s.fhat_new = oracle.sample(s.u);
  s.v = project_box(x_prev - alpha * s.fhat_new, box);
  return s;
}

WeightedAverage running_weighted_average(const WeightedAverage& prev, const RealVec& x_new, double w_new) {
  if (!(w_new > 0.0)) throw InvalidInput("averaging weight must be positive");
  if (!(prev.wsum >= 0.0)) throw InvalidInput("accumulated weight must be nonnegative");
  WeightedAverage out;
  out.wsum = prev.wsum + w_new;
  if (prev.wsum == 0.0) {
    out.avg = x_new;
  } else {
    out.avg = (prev.wsum * prev.avg + w_new * x_new) / out.wsum;
  }
  return out;
}

SolverTrace run_solver(const ProblemSpec& spec, const SolverConfig& cfg) {
  cfg.validate();
  if (spec.dim() == 0) throw InvalidInput("run_solver: empty problem");

  SeededStream init_rng(cfg.master_seed, kInitStream);
  SeededStream con_rng(cfg.master_seed, kConstraintStream);
  StochasticOracle oracle(spec, SeededStream(cfg.master_seed, kNoiseStream));
  const double nan = std::numeric_limits<double>::quiet_NaN();

  SolverTrace trace;
  trace.x0 = sample_uniform_box(spec.base_set, init_rng);
  trace.iterations.reserve(static_cast<std::size_t>(cfg.horizon));

  RealVec x = trace.x0;
  RealVec fhat_old;
  int k = 0;
  try {
    if (cfg.method == Method::kPopov) fhat_old = oracle.sample(x);  // u_0 = x_0

    for (k = 1; k <= cfg.horizon; ++k) {
      const double alpha = step_size_at(cfg.steps, k, cfg.horizon);
      IterationRecord rec;
      rec.k = k;
      rec.alpha = alpha;
      rec.err1_sq = nan;
      rec.err2_sq = nan;

      RealVec u, v;
      if (cfg.method == Method::kKorpelevich) {
        KorpelevichStep s = korpelevich_step(x, alpha, oracle);
        if (cfg.record_errors) {
          rec.err1_sq = error_sq(spec, x, s.fhat_x);
          rec.err2_sq = error_sq(spec, s.u, s.fhat_u);
        }
        u = std::move(s.u);
        v = std::move(s.v);
      } else {
        PopovStep s = popov_step(x, fhat_old, alpha, oracle);
        if (cfg.record_errors) rec.err1_sq = error_sq(spec, s.u, s.fhat_new);
        u = std::move(s.u);
        v = std::move(s.v);
        fhat_old = std::move(s.fhat_new);
      }

      rec.samples = sample_count(cfg.feas.schedule, k);
      FeasibilityPass pass = random_feasibility_pass(v, rec.samples, spec.family, cfg.feas.beta,
                                                     spec.base_set, con_rng);
      x = std::move(pass.x);
      if (!x.allFinite()) throw InvalidInput("iterate became non-finite");

      for (Averaging mode : kAllAveraging) {
        auto& acc = trace.final_averages[static_cast<std::size_t>(mode)];
        acc = running_weighted_average(acc, x, averaging_weight(mode, alpha));
        rec.averages[static_cast<std::size_t>(mode)] = acc.avg;
      }
      rec.fresh_evals = oracle.fresh_calls();
      if (cfg.record_iterates) {
        rec.u = std::move(u);
        rec.v = std::move(v);
        rec.x = x;
        rec.sq_residuals = std::move(pass.sq_residuals);
        rec.sq_subgrad_norms = std::move(pass.sq_subgrad_norms);
      }
      if (cfg.observer) cfg.observer(rec);
      trace.iterations.push_back(std::move(rec));
    }
  } catch (const RunFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw RunFailure(k, e.what());
  }
  trace.fresh_evals = oracle.fresh_calls();
  return trace;
}

}  // namespace rfvi
