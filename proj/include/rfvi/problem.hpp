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

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rfvi/numkit.hpp"

namespace rfvi {

/// Stochastic mapping F^(x, xi) = F(x) + xi with i.i.d. Gaussian xi.
///
/// `lipschitz` and `growth` are the L and M of ||F(x) - F(y)|| <= L||x - y|| + M
/// over the base set. `matrix` is set when the map is linear.
struct MappingOracle {
  std::function<RealVec(const RealVec&)> mean_map;
  double noise_stddev = 0.0;
  double lipschitz = 0.0;
  double growth = 0.0;
  std::optional<RealMat> matrix;

  static MappingOracle linear(RealMat a, double noise_stddev, double lipschitz);
  static MappingOracle zero(Eigen::Index dim);
};

/// g(x) = x_b^T B x_b + c^T x_b - d evaluated on the block
/// x_b = x[offset, offset + dim). B must be symmetric PSD.
struct QuadraticConstraint {
  RealMat B;
  RealVec c;
  double d = 0.0;
  Eigen::Index offset = 0;

  Eigen::Index dim() const { return c.size(); }
  static QuadraticConstraint affine(RealVec c, double d, Eigen::Index offset = 0);
};

double constraint_value(const QuadraticConstraint& con, const RealVec& x);

struct PlusSubgradient {
  double gplus;
  RealVec d;  // full dimension of x; zero outside the constraint block
};

// max(g(x), 0) with d = 2Bx + c (lifted) when g(x) > 0, else the unit vector e_1.
PlusSubgradient constraint_plus_subgradient(const QuadraticConstraint& con, const RealVec& x);

/// Finite list of convex quadratic constraints, or a generative sampler for
/// an infinite family. `subgrad_bound` is M_g: every subgradient the family
/// can produce on the base set has norm at most M_g.
class ConstraintFamily {
 public:
  using Sampler = std::function<QuadraticConstraint(SeededStream&)>;

  ConstraintFamily() = default;

  // M_g = max_a (2 ||B_a||_2 r_a + ||c_a||) with r_a the largest norm of the
  // constraint's block over `box`.
  static ConstraintFamily finite(std::vector<QuadraticConstraint> members, const BoxSet& box);
  static ConstraintFamily finite(std::vector<QuadraticConstraint> members, double subgrad_bound);
  static ConstraintFamily generative(Sampler sampler, double subgrad_bound);

  bool is_finite() const { return !sampler_; }
  bool empty() const { return is_finite() && members_.empty(); }
  std::size_t size() const { return members_.size(); }
  const std::vector<QuadraticConstraint>& members() const { return members_; }
  double subgrad_bound() const { return subgrad_bound_; }

  // Draws a constraint: uniform with replacement for finite families, the
  // sampler's own law otherwise.
  QuadraticConstraint draw(SeededStream& rng) const;
  const QuadraticConstraint& draw_ref(SeededStream& rng) const;

  // Sub-family of members acting on the block starting at `offset`.
  ConstraintFamily restricted_to_block(Eigen::Index offset) const;

  bool satisfied_by(const RealVec& x, double tol = 0.0) const;

 private:
  std::vector<QuadraticConstraint> members_;
  Sampler sampler_;
  double subgrad_bound_ = 0.0;
};

// Contiguous slice of the decision vector owned by one player.
struct PlayerBlock {
  std::string name;
  Eigen::Index offset;
  Eigen::Index size;
};

struct ProblemSpec {
  MappingOracle oracle;
  BoxSet base_set = BoxSet::cube(0, 0.0, 0.0);
  ConstraintFamily family;
  std::optional<double> regularity_c;
  std::vector<PlayerBlock> players;

  Eigen::Index dim() const { return base_set.dim(); }
};

RealVec map_mean(const ProblemSpec& spec, const RealVec& x);
// F(x) + xi. x must lie in the base set.
RealVec map_sample(const ProblemSpec& spec, const RealVec& x, SeededStream& rng);

// B = L sqrt(D) + M + ||F(x_ref)||.
double operator_bound_B(double lipschitz, double diameter_sq, double growth, double fref_norm);

struct GameParameters {
  Eigen::Index player_dim = 2;
  std::size_t num_constraints = 1000;  // per player
  std::pair<double, double> a_eig_range{0.0, 4.0};
  std::pair<double, double> b_eig_range{0.0, 2.0};
  std::pair<double, double> c_range{-10.0, -5.0};
  std::pair<double, double> d_range{-1.0, 0.0};
  double noise_stddev = 0.5;
  double box_half_width = 1.0;
};

// Two-player bilinear game min_y max_z y^T A z on the box, with the given
// per-player constraints duplicated on both blocks. F(x) = [[0, A], [-A^T, 0]] x.
ProblemSpec make_bilinear_game(const RealMat& a, double noise_stddev, double box_half_width,
                               const std::vector<QuadraticConstraint>& player_constraints,
                               SeededStream& rng);

// Random constrained zero-sum game: A = Q diag(U[a_eig_range]) Q^T,
// B_i with spectra U[b_eig_range], c_i ~ U[c_range] per coordinate and
// d_i ~ U[d_range].
ProblemSpec make_zero_sum_game(const GameParameters& params, SeededStream& rng);
ProblemSpec make_zero_sum_game(Eigen::Index n, std::size_t num_constraints, SeededStream& rng);

}  // namespace rfvi
