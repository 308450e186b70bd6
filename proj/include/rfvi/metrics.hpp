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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rfvi/problem.hpp"

namespace rfvi {

struct GapEstimate {
  double value = 0.0;       // |max_x <F(x), y - x>| over the cloud
  double signed_max = 0.0;  // the inner max before the absolute value
  std::size_t num_samples = 0;
  std::size_t num_feasible = 0;
};

/// Feasible points (one per column) obtained by rejection sampling of the
/// base set against the full constraint family.
struct FeasiblePointCloud {
  RealMat points;
  std::uint64_t seed = 0;
  std::size_t num_candidates = 0;

  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
  RealVec point(std::size_t j) const { return points.col(static_cast<Eigen::Index>(j)); }
};

inline constexpr std::size_t kDefaultCloudCandidates = 1500;

FeasiblePointCloud sample_feasible_points(const ProblemSpec& spec, std::size_t n_candidates, SeededStream& rng);

// Direct evaluation of the modified dual gap over the cloud with the mean map.
GapEstimate estimate_modified_dual_gap(const RealVec& y, const FeasiblePointCloud& cloud, const ProblemSpec& spec);

/// Repeated gap evaluation against a fixed cloud. F(x_j) and <F(x_j), x_j>
/// are computed once; each query is a single max over affine functions of y.
class GapEvaluator {
 public:
  GapEvaluator(const FeasiblePointCloud& cloud, const ProblemSpec& spec);
  GapEstimate operator()(const RealVec& y) const;
  std::size_t cloud_size() const { return static_cast<std::size_t>(slopes_.cols()); }

 private:
  RealMat slopes_;
  RealVec offsets_;
  std::size_t num_candidates_;
};

// sum_a max(g_a(x), 0) over a finite family.
double infeasibility_surrogate(const RealVec& x, const ConstraintFamily& family);

struct Halfspace {
  RealVec a;
  double b;  // a^T x <= b
};

RealVec project_halfspace(const RealVec& x, const Halfspace& h);

// Dykstra's alternating projections onto box and halfspaces; `iters` full cycles.
RealVec dykstra_projection(const RealVec& x, const BoxSet& box, const std::vector<Halfspace>& halfspaces,
                           int iters);

using Projector = std::function<RealVec(const RealVec&)>;
double distance_to_feasible(const RealVec& x, const Projector& project);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y ~ slope * x + intercept.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);
// Fit of log(vals) against log(ks).
LineFit fit_loglog(std::span<const double> ks, std::span<const double> vals);
double fit_loglog_rate(std::span<const double> ks, std::span<const double> vals);

// B * sum_t w_t dist_t / sum_t w_t, the computable stand-in for the
// infeasibility term of an averaged iterate on problems with a distance oracle.
double infeasibility_term_estimate(double bound_B, std::span<const double> weights, std::span<const double> dists);

}  // namespace rfvi
