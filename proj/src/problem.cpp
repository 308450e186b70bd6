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

#include "rfvi/problem.hpp"

#include <algorithm>
#include <cmath>

#include "rfvi/errors.hpp"

namespace rfvi {

namespace {

constexpr double kBoxTol = 1e-12;

void check_block(const QuadraticConstraint& con, const RealVec& x) {
  if (con.B.rows() != con.dim() || con.B.cols() != con.dim()) {
    throw InvalidInput("constraint matrix does not match its linear term");
  }
  if (con.offset < 0 || con.offset + con.dim() > x.size()) {
    throw InvalidInput("constraint block [" + std::to_string(con.offset) + ", " +
                       std::to_string(con.offset + con.dim()) + ") does not fit dimension " +
                       std::to_string(x.size()));
  }
}

double block_value(const QuadraticConstraint& con, const Eigen::Ref<const RealVec>& xb) {
  return xb.dot(con.B * xb) + con.c.dot(xb) - con.d;
}

}  // namespace

MappingOracle MappingOracle::linear(RealMat a, double noise_stddev, double lipschitz) {
  if (a.rows() != a.cols()) throw InvalidInput("linear map must be square");
  if (!(noise_stddev >= 0.0)) throw InvalidInput("noise stddev must be nonnegative");
  MappingOracle o;
  o.matrix = a;
  o.mean_map = [m = std::move(a)](const RealVec& x) -> RealVec { return m * x; };
  o.noise_stddev = noise_stddev;
  o.lipschitz = lipschitz;
  o.growth = 0.0;
  return o;
}

MappingOracle MappingOracle::zero(Eigen::Index dim) {
  return linear(RealMat::Zero(dim, dim), 0.0, 0.0);
}

QuadraticConstraint QuadraticConstraint::affine(RealVec c, double d, Eigen::Index offset) {
  const Eigen::Index n = c.size();
  return QuadraticConstraint{RealMat::Zero(n, n), std::move(c), d, offset};
}

double constraint_value(const QuadraticConstraint& con, const RealVec& x) {
  check_block(con, x);
  return block_value(con, x.segment(con.offset, con.dim()));
}

PlusSubgradient constraint_plus_subgradient(const QuadraticConstraint& con, const RealVec& x) {
  check_block(con, x);
  const auto xb = x.segment(con.offset, con.dim());
  const double g = block_value(con, xb);
  PlusSubgradient out{0.0, RealVec::Zero(x.size())};
  if (g > 0.0) {
    out.gplus = g;
    out.d.segment(con.offset, con.dim()) = 2.0 * (con.B * xb) + con.c;
  } else {
    out.d[0] = 1.0;
  }
  return out;
}

ConstraintFamily ConstraintFamily::finite(std::vector<QuadraticConstraint> members, const BoxSet& box) {
  SeededStream rng(0x5eed, 0);
  double mg = 0.0;
  for (const auto& con : members) {
    if (con.offset + con.dim() > box.dim()) throw InvalidInput("constraint block exceeds box dimension");
    const double bnorm = con.B.isZero(0.0) ? 0.0 : spectral_norm_power(con.B, kDefaultPowerIters, rng);
    mg = std::max(mg, 2.0 * bnorm * box.max_norm(con.offset, con.dim()) + con.c.norm());
  }
  return finite(std::move(members), mg);
}

ConstraintFamily ConstraintFamily::finite(std::vector<QuadraticConstraint> members, double subgrad_bound) {
  if (!(subgrad_bound >= 0.0)) throw InvalidInput("subgradient bound must be nonnegative");
  ConstraintFamily f;
  f.members_ = std::move(members);
  f.subgrad_bound_ = subgrad_bound;
  return f;
}

ConstraintFamily ConstraintFamily::generative(Sampler sampler, double subgrad_bound) {
  if (!sampler) throw InvalidInput("generative family needs a sampler");
  if (!(subgrad_bound > 0.0)) throw InvalidInput("subgradient bound must be positive");
  ConstraintFamily f;
  f.sampler_ = std::move(sampler);
  f.subgrad_bound_ = subgrad_bound;
  return f;
}

QuadraticConstraint ConstraintFamily::draw(SeededStream& rng) const {
  if (sampler_) return sampler_(rng);
  return draw_ref(rng);
}

const QuadraticConstraint& ConstraintFamily::draw_ref(SeededStream& rng) const {
  if (sampler_) throw Unsupported("draw_ref on a generative family");
  if (members_.empty()) throw InvalidInput("draw from an empty constraint family");
  return members_[rng.index(members_.size())];
}

ConstraintFamily ConstraintFamily::restricted_to_block(Eigen::Index offset) const {
  if (sampler_) throw Unsupported("block restriction of a generative family");
  std::vector<QuadraticConstraint> sub;
  for (const auto& con : members_)
    if (con.offset == offset) sub.push_back(con);
  return finite(std::move(sub), subgrad_bound_);
}

bool ConstraintFamily::satisfied_by(const RealVec& x, double tol) const {
  if (sampler_) throw Unsupported("full feasibility check of a generative family");
  return std::all_of(members_.begin(), members_.end(),
                     [&](const QuadraticConstraint& con) { return constraint_value(con, x) <= tol; });
}

RealVec map_mean(const ProblemSpec& spec, const RealVec& x) {
  if (x.size() != spec.dim()) throw InvalidInput("map_mean: dimension mismatch");
  if (!spec.base_set.contains(x, kBoxTol)) throw ContractViolation("map_mean: point outside the base set");
  return spec.oracle.mean_map(x);
}

RealVec map_sample(const ProblemSpec& spec, const RealVec& x, SeededStream& rng) {
  RealVec f = map_mean(spec, x);
  if (spec.oracle.noise_stddev > 0.0) f += gaussian_vector(f.size(), spec.oracle.noise_stddev, rng);
  return f;
}

double operator_bound_B(double lipschitz, double diameter_sq, double growth, double fref_norm) {
  if (!(lipschitz >= 0.0) || !(diameter_sq >= 0.0) || !(growth >= 0.0) || !(fref_norm >= 0.0)) {
    throw InvalidInput("operator_bound_B: inputs must be nonnegative");
  }
  return lipschitz * std::sqrt(diameter_sq) + growth + fref_norm;
}

ProblemSpec make_bilinear_game(const RealMat& a, double noise_stddev, double box_half_width,
                               const std::vector<QuadraticConstraint>& player_constraints,
                               SeededStream& rng) {
  if (a.rows() != a.cols()) throw InvalidInput("payoff matrix must be square");
  const Eigen::Index n = a.rows();
  RealMat skew = RealMat::Zero(2 * n, 2 * n);
  skew.topRightCorner(n, n) = a;
  skew.bottomLeftCorner(n, n) = -a.transpose();
  const double lip = spectral_norm_power(a, kDefaultPowerIters, rng);

  ProblemSpec spec;
  spec.base_set = BoxSet::cube(2 * n, -box_half_width, box_half_width);
  spec.oracle = MappingOracle::linear(std::move(skew), noise_stddev, lip);

  std::vector<QuadraticConstraint> members;
  members.reserve(2 * player_constraints.size());
  for (Eigen::Index off : {Eigen::Index{0}, n}) {
    for (QuadraticConstraint con : player_constraints) {
      if (con.dim() != n) throw InvalidInput("player constraint dimension mismatch");
      con.offset = off;
      members.push_back(std::move(con));
    }
  }
  spec.family = ConstraintFamily::finite(std::move(members), spec.base_set);
  spec.players = {{"player1", 0, n}, {"player2", n, n}};
  return spec;
}

ProblemSpec make_zero_sum_game(const GameParameters& p, SeededStream& rng) {
  if (p.player_dim < 1) throw InvalidInput("player dimension must be >= 1");
  const Eigen::Index n = p.player_dim;
  auto uniform_vec = [&](SeededStream& s, std::pair<double, double> r) {
    RealVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = s.uniform(r.first, r.second);
    return v;
  };

  SeededStream payoff_rng = rng.split(0);
  const RealMat a = random_sym_with_spectrum(uniform_vec(payoff_rng, p.a_eig_range), payoff_rng);

  SeededStream con_rng = rng.split(1);
  std::vector<QuadraticConstraint> cons;
  cons.reserve(p.num_constraints);
  for (std::size_t i = 0; i < p.num_constraints; ++i) {
    QuadraticConstraint con;
    con.B = random_sym_with_spectrum(uniform_vec(con_rng, p.b_eig_range), con_rng);
    con.c = uniform_vec(con_rng, p.c_range);
    con.d = con_rng.uniform(p.d_range.first, p.d_range.second);
    cons.push_back(std::move(con));
  }
  SeededStream norm_rng = rng.split(2);
  return make_bilinear_game(a, p.noise_stddev, p.box_half_width, cons, norm_rng);
}

ProblemSpec make_zero_sum_game(Eigen::Index n, std::size_t num_constraints, SeededStream& rng) {
  GameParameters p;
  p.player_dim = n;
  p.num_constraints = num_constraints;
  return make_zero_sum_game(p, rng);
}

}  // namespace rfvi
