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

#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "rfvi/errors.hpp"
#include "rfvi/problem.hpp"

using namespace rfvi;

namespace {

RealMat skew_of(const RealMat& a) {
  const Eigen::Index n = a.rows();
  RealMat s = RealMat::Zero(2 * n, 2 * n);
  s.topRightCorner(n, n) = a;
  s.bottomLeftCorner(n, n) = -a.transpose();
  return s;
}

ProblemSpec identity_skew_game(double noise) {
  SeededStream rng(1, 0);
  return make_bilinear_game(RealMat::Identity(2, 2), noise, 1.0, {}, rng);
}

}  // namespace

TEST_CASE("map_sample of the noiseless skew game is the exact product") {
  const ProblemSpec spec = identity_skew_game(0.0);
  SeededStream rng(2, 0);
  const RealVec x{{1.0, 0.0, 0.0, 0.0}};
  CHECK(map_sample(spec, x, rng) == RealVec{{0.0, 0.0, -1.0, 0.0}});
  for (int i = 0; i < 100; ++i) {
    const RealVec y = sample_uniform_box(spec.base_set, rng);
    CHECK(map_sample(spec, y, rng) == map_mean(spec, y));
  }
}

TEST_CASE("map_sample is unbiased with unit second moment of the noise") {
  const ProblemSpec spec = identity_skew_game(0.5);
  SeededStream rng(3, 0);
  const RealVec x{{0.3, -0.2, 0.5, 0.1}};
  const RealVec mean = map_mean(spec, x);
  RealVec sum = RealVec::Zero(4);
  double sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const RealVec s = map_sample(spec, x, rng);
    sum += s;
    sq += (s - mean).squaredNorm();
  }
  CHECK((sum / n - mean).cwiseAbs().maxCoeff() < 0.02);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("map_mean") {
  ProblemSpec z;
  z.base_set = BoxSet::cube(3, -1, 1);
  z.oracle = MappingOracle::zero(3);
  CHECK(map_mean(z, RealVec{{0.1, 0.2, 0.3}}) == RealVec::Zero(3));

  const ProblemSpec spec = identity_skew_game(0.0);
  CHECK(map_mean(spec, RealVec::Zero(4)) == RealVec::Zero(4));
  CHECK_THROWS_AS(map_mean(spec, RealVec{{2.0, 0.0, 0.0, 0.0}}), ContractViolation);
  CHECK_THROWS_AS(map_mean(spec, RealVec::Zero(3)), InvalidInput);
}

TEST_CASE("generated games are skew and monotone with equality") {
  SeededStream rng(4, 0);
  const ProblemSpec spec = make_zero_sum_game(2, 1000, rng);
  const RealMat& m = *spec.oracle.matrix;
  CHECK((m + m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 1000; ++i) {
    const RealVec x = sample_uniform_box(spec.base_set, rng);
    const RealVec y = sample_uniform_box(spec.base_set, rng);
    CHECK(std::abs((map_mean(spec, x) - map_mean(spec, y)).dot(x - y)) <= 1e-10);
  }
}

TEST_CASE("constraint_value") {
  QuadraticConstraint q{RealMat::Identity(2, 2), RealVec::Zero(2), 1.0, 0};
  CHECK(constraint_value(q, RealVec{{1.0, 1.0}}) == 1.0);
  const auto lin = QuadraticConstraint::affine(RealVec{{1.0}}, 0.0);
  CHECK(constraint_value(lin, RealVec{{-2.0}}) == -2.0);

  SeededStream rng(5, 0);
  for (int t = 0; t < 200; ++t) {
    RealVec eigs(3);
    for (Eigen::Index i = 0; i < 3; ++i) eigs[i] = rng.uniform(0.0, 2.0);
    QuadraticConstraint c;
    c.B = random_sym_with_spectrum(eigs, rng);
    c.c = gaussian_vector(3, 1.0, rng);
    c.d = rng.uniform(-1.0, 1.0);
    const RealVec x = gaussian_vector(3, 1.0, rng);
    const Eigen::SelfAdjointEigenSolver<RealMat> es(c.B);
    double oracle = c.c.dot(x) - c.d;
    for (Eigen::Index i = 0; i < 3; ++i) {
      const double p = es.eigenvectors().col(i).dot(x);
      oracle += es.eigenvalues()[i] * p * p;
    }
    CHECK(std::abs(constraint_value(c, x) - oracle) <= 1e-10);
  }
}

TEST_CASE("constraint_value on a block of a larger vector") {
  auto c = QuadraticConstraint::affine(RealVec{{1.0, 2.0}}, 1.0, 2);
  CHECK(constraint_value(c, RealVec{{9.0, 9.0, 1.0, 1.0}}) == 2.0);
  c.offset = 3;
  CHECK_THROWS_AS(constraint_value(c, RealVec::Zero(4)), InvalidInput);
}

TEST_CASE("constraint_plus_subgradient") {
  const auto g = QuadraticConstraint::affine(RealVec{{1.0}}, 1.0);
  const auto at3 = constraint_plus_subgradient(g, RealVec{{3.0}});
  CHECK(at3.gplus == 2.0);
  CHECK(at3.d == RealVec{{1.0}});
  const auto at0 = constraint_plus_subgradient(g, RealVec{{0.0}});
  CHECK(at0.gplus == 0.0);
  CHECK(at0.d == RealVec{{1.0}});
}

TEST_CASE("plus-subgradient satisfies the subgradient inequality") {
  SeededStream rng(6, 0);
  int checked = 0;
  while (checked < 200) {
    QuadraticConstraint c;
    c.B = random_sym_with_spectrum(RealVec{{rng.uniform(0, 2), rng.uniform(0, 2)}}, rng);
    c.c = gaussian_vector(2, 1.0, rng);
    c.d = rng.uniform(-1.0, 0.0);
    c.offset = 1;
    const RealVec x = gaussian_vector(3, 1.0, rng);
    const auto ps = constraint_plus_subgradient(c, x);
    if (ps.gplus <= 0.0) continue;
    CHECK(ps.d[0] == 0.0);
    for (int j = 0; j < 20; ++j) {
      const RealVec y = gaussian_vector(3, 2.0, rng);
      CHECK(constraint_value(c, y) >= ps.gplus + ps.d.dot(y - x) - 1e-10);
    }
    ++checked;
  }
}

TEST_CASE("operator_bound_B") {
  CHECK(operator_bound_B(2.0, 4.0, 0.0, 1.0) == 5.0);
  CHECK(operator_bound_B(0, 0, 0, 0) == 0.0);
  CHECK_THROWS_AS(operator_bound_B(-1, 0, 0, 0), InvalidInput);

  SeededStream rng(7, 0);
  const ProblemSpec spec = make_zero_sum_game(2, 10, rng);
  const double b = operator_bound_B(spec.oracle.lipschitz, spec.base_set.diameter_sq(), 0.0, 0.0);
  CHECK(b == doctest::Approx(4.0 * spec.oracle.lipschitz));
  const RealMat& a = spec.oracle.matrix->topRightCorner(2, 2);
  CHECK(spec.oracle.lipschitz == doctest::Approx(Eigen::JacobiSVD<RealMat>(a).singularValues()[0]).epsilon(1e-9));
  for (int i = 0; i < 10000; ++i) {
    CHECK(map_mean(spec, sample_uniform_box(spec.base_set, rng)).norm() <= b);
  }
}

TEST_CASE("make_zero_sum_game structure") {
  SeededStream rng(8, 0);
  const ProblemSpec spec = make_zero_sum_game(2, 1000, rng);
  CHECK(spec.dim() == 4);
  CHECK(spec.family.size() == 2000);
  CHECK(spec.family.restricted_to_block(0).size() == 1000);
  CHECK(spec.family.restricted_to_block(2).size() == 1000);
  REQUIRE(spec.players.size() == 2);
  CHECK(spec.players[1].offset == 2);

  const RealMat a = spec.oracle.matrix->topRightCorner(2, 2);
  const RealVec ev = Eigen::SelfAdjointEigenSolver<RealMat>(a).eigenvalues();
  CHECK(ev.minCoeff() >= -1e-8);
  CHECK(ev.maxCoeff() <= 4.0 + 1e-8);
  for (const auto& c : spec.family.members()) {
    CHECK(c.c.maxCoeff() <= -5.0);
    CHECK(c.c.minCoeff() >= -10.0);
    CHECK((c.d >= -1.0 && c.d <= 0.0));
  }

  const BoxSet player_box = BoxSet::cube(2, -1.0, 1.0);
  for (const auto offset : {Eigen::Index{0}, Eigen::Index{2}}) {
    const ConstraintFamily fam = spec.family.restricted_to_block(offset);
    bool found = false;
    for (int i = 0; i < 10000 && !found; ++i) {
      RealVec x = RealVec::Zero(4);
      x.segment(offset, 2) = sample_uniform_box(player_box, rng);
      found = fam.satisfied_by(x);
    }
    CHECK(found);
  }
}

TEST_CASE("subgradient bound covers every member over the box") {
  SeededStream rng(9, 0);
  const ProblemSpec spec = make_zero_sum_game(2, 200, rng);
  const double mg = spec.family.subgrad_bound();
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const RealVec x = sample_uniform_box(spec.base_set, rng);
    for (const auto& c : spec.family.members()) {
      const auto xb = x.segment(c.offset, 2);
      worst = std::max(worst, (2.0 * c.B * xb + c.c).norm());
    }
  }
  CHECK(worst <= mg);
}

TEST_CASE("ConstraintFamily draws and restrictions") {
  std::vector<QuadraticConstraint> cons{QuadraticConstraint::affine(RealVec{{1.0}}, 0.0),
                                        QuadraticConstraint::affine(RealVec{{-1.0}}, 0.0)};
  const auto fam = ConstraintFamily::finite(cons, BoxSet::cube(1, -1, 1));
  CHECK(fam.subgrad_bound() == 1.0);
  SeededStream rng(10, 0);
  int first = 0;
  for (int i = 0; i < 10000; ++i) first += fam.draw_ref(rng).c[0] > 0 ? 1 : 0;
  CHECK(std::abs(first - 5000) < 300);

  const auto gen = ConstraintFamily::generative(
      [](SeededStream& r) { return QuadraticConstraint::affine(RealVec{{r.uniform(0.5, 1.0)}}, 0.0); }, 1.0);
  CHECK_FALSE(gen.is_finite());
  CHECK(gen.draw(rng).c[0] >= 0.5);
  CHECK_THROWS_AS(gen.satisfied_by(RealVec{{0.0}}), Unsupported);
  CHECK_THROWS_AS(ConstraintFamily::finite({}, 1.0).draw_ref(rng), InvalidInput);
}

TEST_CASE("make_bilinear_game builds the block skew operator") {
  SeededStream rng(12, 0);
  RealMat a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  const ProblemSpec spec = make_bilinear_game(a, 0.0, 2.0, {}, rng);
  CHECK(*spec.oracle.matrix == skew_of(a));
  CHECK(spec.base_set.hi()[0] == 2.0);
  CHECK(spec.family.empty());
}
