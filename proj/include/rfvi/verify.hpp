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

// Independent oracles and inequality checkers. Nothing here calls back into
// the code it checks except for RealVec arithmetic and the problem data
// types; exact projections are computed by polygon clipping, not by the
// alternating-projection routines of the metrics module.

#include <cstdint>
#include <string>
#include <vector>

#include "rfvi/metrics.hpp"
#include "rfvi/problem.hpp"
#include "rfvi/solvers.hpp"

namespace rfvi::verify {

/// A problem together with a certified point of S = X cap Y and, for 2D
/// polyhedral test problems, an exact projection onto S.
struct WitnessedProblem {
  ProblemSpec spec;
  RealVec witness;
  Projector projection;  // empty when no exact oracle exists
};

// Finds a witness by rejection sampling the base set; throws EmptyCloud if
// none of the candidates is feasible.
WitnessedProblem with_witness(ProblemSpec spec, std::size_t n_candidates, SeededStream& rng);

// Exact Euclidean projection onto {x in box : a_i^T x <= b_i} in 2D by
// clipping the box polygon and projecting onto its edges.
RealVec project_polygon_2d(const RealVec& x, const BoxSet& box, const std::vector<Halfspace>& halfspaces);

// Zero-map problem on a 2D box with affine constraints a_i^T x - b_i <= 0,
// carrying the exact polygon projection and the polygon centroid as witness.
WitnessedProblem make_box_halfspace_problem(const BoxSet& box, const std::vector<Halfspace>& halfspaces);

// Box [-1, 1]^2 cut by one halfspace with a random unit normal through a
// random point of [-0.9, 0.9]^2.
WitnessedProblem random_box_halfspace_problem(SeededStream& rng);

RealVec brute_force_projection_grid(const RealVec& x, const WitnessedProblem& wp, double pitch);

// max_i |central difference_i - d_i| at a point with g(x) > 0.
double finite_diff_subgrad_check(const QuadraticConstraint& con, const RealVec& x, double h);

struct PassInequalityReport {
  double worst_abs = 0.0;       // max_k (LHS - RHS)
  double worst_relative = 0.0;  // max_k (LHS - RHS) / (1 + ||v_k - xbar||^2)
  int worst_iteration = 0;
};

// ||x_k - xbar||^2 <= ||v_k - xbar||^2 - beta (2 - beta) / M_g^2 * sum (g+)^2
// at every iteration of the trace.
PassInequalityReport check_pass_inequality(const SolverTrace& trace, const WitnessedProblem& wp, double beta,
                                double subgrad_bound);

// Randomized zero-sum-game runs (method, beta and game drawn per run) with
// N_k = ceil(sqrt(k)); returns the worst relative violation over all runs.
double pass_inequality_sweep(int runs, int horizon, std::uint64_t master_seed);

// Worst relative violation of the single Polyak step inequality over
// `cases` random affine/quadratic constraints with feasible witnesses.
double check_polyak_inequality(int cases, SeededStream& rng);

struct DecayReport {
  std::vector<double> ns;
  std::vector<double> mean_dist;  // floored at kDistFloor
  LineFit fit;                    // log(mean_dist) against N
};

inline constexpr double kDistFloor = 1e-300;

DecayReport check_feasibility_decay(const WitnessedProblem& wp, double beta, const std::vector<int>& ns,
                                    int seeds, std::uint64_t master_seed);

// Largest ||pass(v) - dykstra(v)|| over random 2D box/halfspace instances.
double check_pass_vs_dykstra(int instances, int n_steps, double beta, std::uint64_t master_seed);

struct SequenceBoundsRow {
  double alpha_bar;
  long long horizon;
  double sum_alpha, sum_alpha_bound;
  double sum_alpha_sq, sum_alpha_sq_bound;
  double sum_inv_alpha, sum_inv_alpha_bound;  // bound only meaningful for T >= 2
  bool holds;
};

std::vector<SequenceBoundsRow> sequence_bounds_table(double alpha_bar, const std::vector<long long>& horizons);
bool check_sequence_bounds(double alpha_bar, const std::vector<long long>& horizons);

struct CheckResult {
  std::string name;
  bool passed;
  double measured;
  double threshold;
  std::string detail;
};

std::vector<CheckResult> run_verification_suite(std::uint64_t seed);
std::string report_json(const std::vector<CheckResult>& results);

}  // namespace rfvi::verify
