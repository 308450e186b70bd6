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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "rfvi/feasibility.hpp"
#include "rfvi/problem.hpp"

namespace rfvi {

enum class Method { kKorpelevich, kPopov };

enum class StepKind {
  kConstantHorizon,  // min(alpha_bar / sqrt(T), cap)
  kDiminishing,      // min(alpha_bar / sqrt(k + 1), cap)
  kParameterFree,    // alpha_bar / sqrt(k + 1), cap ignored
};

struct StepSchedule {
  StepKind kind = StepKind::kDiminishing;
  double alpha_bar = 0.3;
  std::optional<double> cap;

  // sqrt(1 - w4) / (sqrt(2) L); nullopt when L == 0.
  static std::optional<double> cap_from(double w4, double lipschitz);
  void validate() const;
};

double step_size_at(const StepSchedule& s, long long k, long long horizon);

enum class Averaging { kAlpha = 0, kInverseAlpha = 1, kUniform = 2 };
inline constexpr std::array<Averaging, 3> kAllAveraging = {Averaging::kAlpha, Averaging::kInverseAlpha,
                                                           Averaging::kUniform};

std::string_view to_string(Method m);
std::string_view to_string(StepKind k);
std::string_view to_string(Averaging a);

double averaging_weight(Averaging mode, double alpha);

struct IterationRecord;

struct SolverConfig {
  Method method = Method::kKorpelevich;
  StepSchedule steps;
  Averaging averaging = Averaging::kInverseAlpha;  // the one reported by default
  FeasibilityConfig feas;
  int horizon = 5000;
  std::uint64_t master_seed = 1;
  bool record_iterates = true;
  bool record_errors = false;
  // Called after every iteration with the completed record.
  std::function<void(const IterationRecord&)> observer;

  void validate() const;
};

/// Oracle wrapper that counts fresh stochastic evaluations.
class StochasticOracle {
 public:
  StochasticOracle(const ProblemSpec& spec, SeededStream stream) : spec_(spec), rng_(std::move(stream)) {}

  RealVec sample(const RealVec& x);
  std::uint64_t fresh_calls() const { return calls_; }
  const ProblemSpec& spec() const { return spec_; }

 private:
  const ProblemSpec& spec_;
  SeededStream rng_;
  std::uint64_t calls_ = 0;
};

struct KorpelevichStep {
  RealVec u, v;
  RealVec fhat_x, fhat_u;
};

// u = Pi_Y[x - a F^(x, xi1)], v = Pi_Y[x - a F^(u, xi2)].
KorpelevichStep korpelevich_step(const RealVec& x_prev, double alpha, StochasticOracle& oracle);

struct PopovStep {
  RealVec u, v;
  RealVec fhat_new;
};

// u = Pi_Y[x - a F_old], F_new = F^(u, xi), v = Pi_Y[x - a F_new].
PopovStep popov_step(const RealVec& x_prev, const RealVec& fhat_old, double alpha, StochasticOracle& oracle);

struct WeightedAverage {
  RealVec avg;
  double wsum = 0.0;
};

WeightedAverage running_weighted_average(const WeightedAverage& prev, const RealVec& x_new, double w_new);

struct IterationRecord {
  int k = 0;
  double alpha = 0.0;
  int samples = 0;
  RealVec u, v, x;
  std::array<RealVec, 3> averages;  // indexed by Averaging
  std::uint64_t fresh_evals = 0;    // cumulative
  std::vector<double> sq_residuals;
  std::vector<double> sq_subgrad_norms;
  // Squared stochastic errors ||F - F^||^2 for the two (Korpelevich) or one
  // (Popov, in err1_sq) fresh evaluations; NaN unless record_errors.
  double err1_sq = 0.0;
  double err2_sq = 0.0;
};

struct SolverTrace {
  RealVec x0;
  std::vector<IterationRecord> iterations;
  std::array<WeightedAverage, 3> final_averages;
  std::uint64_t fresh_evals = 0;

  const RealVec& average(Averaging mode) const {
    return final_averages[static_cast<std::size_t>(mode)].avg;
  }
};

SolverTrace run_solver(const ProblemSpec& spec, const SolverConfig& cfg);

}  // namespace rfvi
