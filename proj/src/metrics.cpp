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

#include "rfvi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfvi/errors.hpp"
#include "rfvi/kernels.hpp"

namespace rfvi {

FeasiblePointCloud sample_feasible_points(const ProblemSpec& spec, std::size_t n_candidates, SeededStream& rng) {
  if (n_candidates < 1) throw InvalidInput("sample_feasible_points: need at least one candidate");
  if (!spec.family.is_finite()) throw Unsupported("rejection sampling needs a finite constraint family");

  RealMat candidates(spec.dim(), static_cast<Eigen::Index>(n_candidates));
  for (Eigen::Index j = 0; j < candidates.cols(); ++j) candidates.col(j) = sample_uniform_box(spec.base_set, rng);
  const auto mask = kernels::omp::feasible_mask(spec.family.members(), candidates);

  const auto kept = static_cast<Eigen::Index>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
  if (kept == 0) {
    throw EmptyCloud("none of " + std::to_string(n_candidates) + " candidates is feasible");
  }
  FeasiblePointCloud cloud;
  cloud.seed = rng.master_seed();
  cloud.num_candidates = n_candidates;
  cloud.points.resize(spec.dim(), kept);
  Eigen::Index out = 0;
  for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
    if (mask[static_cast<std::size_t>(j)]) cloud.points.col(out++) = candidates.col(j);
  }
  return cloud;
}

GapEstimate estimate_modified_dual_gap(const RealVec& y, const FeasiblePointCloud& cloud, const ProblemSpec& spec) {
  if (cloud.size() == 0) throw EmptyCloud("gap estimate over an empty cloud");
  if (y.size() != spec.dim()) throw InvalidInput("gap estimate: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    const RealVec x = cloud.point(j);
    best = std::max(best, map_mean(spec, x).dot(y - x));
  }
  return {std::abs(best), best, cloud.num_candidates, cloud.size()};
}

GapEvaluator::GapEvaluator(const FeasiblePointCloud& cloud, const ProblemSpec& spec)
    : num_candidates_(cloud.num_candidates) {
  if (cloud.size() == 0) throw EmptyCloud("gap evaluator over an empty cloud");
  slopes_ = kernels::omp::map_columns([&spec](const RealVec& x) { return map_mean(spec, x); }, cloud.points);
  offsets_.resize(slopes_.cols());
  for (Eigen::Index j = 0; j < slopes_.cols(); ++j) offsets_[j] = slopes_.col(j).dot(cloud.points.col(j));
}

GapEstimate GapEvaluator::operator()(const RealVec& y) const {
  const double best = kernels::omp::max_affine(slopes_, offsets_, y);
  return {std::abs(best), best, num_candidates_, cloud_size()};
}

double infeasibility_surrogate(const RealVec& x, const ConstraintFamily& family) {
  if (!family.is_finite()) throw Unsupported("infeasibility surrogate over an infinite family");
  std::vector<double> values(family.size());
  kernels::omp::constraint_values(family.members(), x, values);
  return kernels::positive_part_sum(values);
}

RealVec project_halfspace(const RealVec& x, const Halfspace& h) {
  const double viol = h.a.dot(x) - h.b;
  if (viol <= 0.0) return x;
  const double aa = h.a.squaredNorm();
  if (aa == 0.0) throw InvalidInput("halfspace with zero normal excludes everything");
  return x - (viol / aa) * h.a;
}

RealVec dykstra_projection(const RealVec& x, const BoxSet& box, const std::vector<Halfspace>& halfspaces,
                           int iters) {
  if (iters < 1) throw InvalidInput("dykstra_projection: iters must be >= 1");
  if (x.size() != box.dim()) throw InvalidInput("dykstra_projection: dimension mismatch");
  const std::size_t m = halfspaces.size() + 1;
  std::vector<RealVec> incr(m, RealVec::Zero(x.size()));
  RealVec z = x;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      const RealVec w = z + incr[i];
      RealVec p = i == 0 ? project_box(w, box) : project_halfspace(w, halfspaces[i - 1]);
      incr[i] = w - p;
      z = std::move(p);
    }
  }
  return z;
}

double distance_to_feasible(const RealVec& x, const Projector& project) { return (x - project(x)).norm(); }

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidInput("fit_line: size mismatch");
  if (xs.size() < 2) throw InvalidInput("fit_line: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InvalidInput("fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // A perfectly flat response is fitted exactly.
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

LineFit fit_loglog(std::span<const double> ks, std::span<const double> vals) {
  if (ks.size() < 3) throw InvalidInput("fit_loglog: need at least three points");
  if (ks.size() != vals.size()) throw InvalidInput("fit_loglog: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0) || !(vals[i] > 0.0)) throw InvalidInput("fit_loglog: values must be positive");
    lx.push_back(std::log(ks[i]));
    ly.push_back(std::log(vals[i]));
  }
  return fit_line(lx, ly);
}

double fit_loglog_rate(std::span<const double> ks, std::span<const double> vals) {
  return fit_loglog(ks, vals).slope;
}

double infeasibility_term_estimate(double bound_B, std::span<const double> weights, std::span<const double> dists) {
  if (weights.size() != dists.size() || weights.empty()) throw InvalidInput("infeasibility term: bad sizes");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw InvalidInput("infeasibility term: weights must be positive");
    num += weights[i] * dists[i];
    den += weights[i];
  }
  return bound_B * num / den;
}

}  // namespace rfvi
