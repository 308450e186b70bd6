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

#include <variant>
#include <vector>

#include "rfvi/problem.hpp"

namespace rfvi {

// Rules for the number N_k of feasibility steps taken at iteration k.
struct ConstantSamples {
  int n = 1;
};
struct RootGrowth {  // ceil(k^(1/r))
  double r = 2.0;
};
struct LogGrowth {  // max(1, ceil(log_m k))
  double m = 2.0;
};
struct MaxConstRoot {  // max(n, ceil(k^(1/r)))
  int n = 1;
  double r = 2.0;
};

using SampleSchedule = std::variant<ConstantSamples, RootGrowth, LogGrowth, MaxConstRoot>;

void validate_schedule(const SampleSchedule& schedule);
int sample_count(const SampleSchedule& schedule, long long k);

struct FeasibilityConfig {
  double beta = 1.0;
  SampleSchedule schedule = RootGrowth{2.0};

  void validate() const;
};

// Pi_Y[z - beta * gplus / ||d||^2 * d]; z unchanged when gplus == 0.
RealVec polyak_step(const RealVec& z, double gplus, const RealVec& d, double beta, const BoxSet& box);

struct FeasibilityPass {
  RealVec x;
  std::vector<double> sq_residuals;       // (g+_{omega_i}(z_{i-1}))^2
  std::vector<double> sq_subgrad_norms;   // ||d_i||^2, 0 when the step was a no-op
};

// N sequential Polyak steps at constraints drawn from `family`.
FeasibilityPass random_feasibility_pass(const RealVec& v, int n, const ConstraintFamily& family,
                                        double beta, const BoxSet& box, SeededStream& rng);

struct ContractionFactor {
  double q;
  bool clamped;  // raw value exceeded 1 and was reported as 1
};

// q = beta (2 - beta) / (c M_g^2).
ContractionFactor compute_q(double beta, double c, double subgrad_bound);

}  // namespace rfvi
