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

#include <cmath>

#include "rfvi/errors.hpp"
#include "rfvi/solvers.hpp"

using namespace rfvi;

namespace {

ProblemSpec identity_1d() {
  ProblemSpec spec;
  spec.base_set = BoxSet::cube(1, -1.0, 1.0);
  spec.oracle = MappingOracle::linear(RealMat::Identity(1, 1), 0.0, 1.0);
  return spec;
}

ProblemSpec zero_map(Eigen::Index n) {
  ProblemSpec spec;
  spec.base_set = BoxSet::cube(n, -1.0, 1.0);
  spec.oracle = MappingOracle::zero(n);
  return spec;
}

ProblemSpec game(std::uint64_t seed, std::size_t cons = 1000) {
  SeededStream rng(seed, 0);
  return make_zero_sum_game(2, cons, rng);
}

SolverConfig base_config(Method m, int horizon) {
  SolverConfig cfg;
  cfg.method = m;
  cfg.horizon = horizon;
  cfg.master_seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("step_size_at") {
  StepSchedule pf{StepKind::kParameterFree, 1.0, 0.01};
  CHECK(step_size_at(pf, 3, 10) == 0.5);
  StepSchedule ch{StepKind::kConstantHorizon, 1.0, std::nullopt};
  for (int k = 1; k <= 100; ++k) CHECK(step_size_at(ch, k, 100) == doctest::Approx(0.1));
  StepSchedule dim{StepKind::kDiminishing, 1.0, 0.2};
  CHECK(step_size_at(dim, 3, 10) == 0.2);
  CHECK(step_size_at(dim, 100, 100) == doctest::Approx(1.0 / std::sqrt(101.0)));
  CHECK_THROWS_AS(step_size_at(dim, 0, 10), InvalidInput);
  CHECK_THROWS_AS(step_size_at(dim, 11, 10), InvalidInput);
}

TEST_CASE("cap_from") {
  CHECK(*StepSchedule::cap_from(0.1, 2.0) == doctest::Approx(std::sqrt(0.9) / (std::sqrt(2.0) * 2.0)));
  CHECK_FALSE(StepSchedule::cap_from(0.1, 0.0).has_value());
  CHECK_THROWS_AS(StepSchedule::cap_from(1.0, 1.0), ConfigError);
}

TEST_CASE("to_string names") {
  CHECK(to_string(Method::kPopov) == "popov");
  CHECK(to_string(StepKind::kParameterFree) == "parameter_free");
  CHECK(to_string(Averaging::kInverseAlpha) == "inv_alpha");
}

TEST_CASE("korpelevich_step") {
  const ProblemSpec z = zero_map(3);
  StochasticOracle oz(z, SeededStream(1, 0));
  const RealVec x{{0.1, -0.2, 0.3}};
  auto s0 = korpelevich_step(x, 0.7, oz);
  CHECK(s0.u == x);
  CHECK(s0.v == x);
  CHECK(oz.fresh_calls() == 2);

  const ProblemSpec lin = identity_1d();
  StochasticOracle o(lin, SeededStream(1, 0));
  auto s = korpelevich_step(RealVec{{1.0}}, 0.5, o);
  CHECK(s.u[0] == 0.5);
  CHECK(s.v[0] == 0.75);

  auto fixed = korpelevich_step(RealVec{{0.0}}, 0.5, o);
  CHECK(fixed.u[0] == 0.0);
  CHECK(fixed.v[0] == 0.0);
}

TEST_CASE("popov_step") {
  const ProblemSpec z = zero_map(2);
  StochasticOracle oz(z, SeededStream(1, 0));
  const RealVec x{{0.4, -0.4}};
  auto s0 = popov_step(x, RealVec::Zero(2), 0.3, oz);
  CHECK(s0.u == x);
  CHECK(s0.v == x);
  CHECK(s0.fhat_new == RealVec::Zero(2));
  CHECK(oz.fresh_calls() == 1);

  const ProblemSpec lin = identity_1d();
  StochasticOracle o(lin, SeededStream(1, 0));
  auto s = popov_step(RealVec{{1.0}}, RealVec{{1.0}}, 0.5, o);
  CHECK(s.u[0] == 0.5);
  CHECK(s.fhat_new[0] == 0.5);
  CHECK(s.v[0] == 0.75);
  CHECK(o.fresh_calls() == 1);
  popov_step(s.v, s.fhat_new, 0.5, o);
  CHECK(o.fresh_calls() == 2);
}

TEST_CASE("running_weighted_average") {
  const RealVec a{{1.0, 2.0}}, b{{3.0, -2.0}};
  WeightedAverage w;
  w = running_weighted_average(w, a, 1.0);
  CHECK(w.avg == a);
  w = running_weighted_average(w, b, 1.0);
  CHECK((w.avg - RealVec{{2.0, 0.0}}).norm() <= 1e-15);
  CHECK(w.wsum == 2.0);
}

TEST_CASE("running_weighted_average matches the batch formula for inverse step weights") {
  SeededStream rng(2, 0);
  WeightedAverage w;
  RealVec num = RealVec::Zero(3);
  double den = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const RealVec x = gaussian_vector(3, 1.0, rng);
    const double alpha = 1.0 / std::sqrt(k + 1.0);
    const double g = averaging_weight(Averaging::kInverseAlpha, alpha);
    CHECK(g == doctest::Approx(1.0 / alpha));
    w = running_weighted_average(w, x, g);
    num += g * x;
    den += g;
  }
  CHECK((w.avg - num / den).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fresh evaluation counts are exact") {
  const ProblemSpec spec = game(1, 50);
  for (int t : {1, 7, 100}) {
    CHECK(run_solver(spec, base_config(Method::kKorpelevich, t)).fresh_evals == 2u * t);
    CHECK(run_solver(spec, base_config(Method::kPopov, t)).fresh_evals == t + 1u);
  }
}

TEST_CASE("run_solver is deterministic") {
  const ProblemSpec spec = game(2, 100);
  for (Method m : {Method::kKorpelevich, Method::kPopov}) {
    const SolverTrace a = run_solver(spec, base_config(m, 200));
    const SolverTrace b = run_solver(spec, base_config(m, 200));
    REQUIRE(a.iterations.size() == b.iterations.size());
    for (std::size_t i = 0; i < a.iterations.size(); ++i) {
      CHECK(a.iterations[i].x == b.iterations[i].x);
      CHECK(a.iterations[i].u == b.iterations[i].u);
      CHECK(a.iterations[i].sq_residuals == b.iterations[i].sq_residuals);
    }
    for (Averaging mode : kAllAveraging) CHECK(a.average(mode) == b.average(mode));
  }
}

TEST_CASE("trace invariants: points in Y, convex averages, step cap") {
  const ProblemSpec spec = game(3, 200);
  SolverConfig cfg = base_config(Method::kKorpelevich, 400);
  cfg.steps.cap = StepSchedule::cap_from(0.1, spec.oracle.lipschitz);
  const SolverTrace tr = run_solver(spec, cfg);
  RealVec lo = RealVec::Constant(4, 1e300), hi = RealVec::Constant(4, -1e300);
  for (const auto& r : tr.iterations) {
    CHECK(spec.base_set.contains(r.u));
    CHECK(spec.base_set.contains(r.v));
    CHECK(spec.base_set.contains(r.x));
    CHECK(r.alpha <= *cfg.steps.cap);
    lo = lo.cwiseMin(r.x);
    hi = hi.cwiseMax(r.x);
    for (const auto& avg : r.averages) {
      CHECK(spec.base_set.contains(avg, 1e-12));
      CHECK((avg.array() >= lo.array() - 1e-12).all());
      CHECK((avg.array() <= hi.array() + 1e-12).all());
    }
    CHECK(r.sq_residuals.size() == static_cast<std::size_t>(r.samples));
  }
}

TEST_CASE("a zero of F interior to S is a fixed point of both methods") {
  ProblemSpec spec;
  spec.base_set = BoxSet::cube(2, -1.0, 1.0);
  RealMat a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;
  spec.oracle = MappingOracle::linear(a, 0.0, 1.0);
  spec.family = ConstraintFamily::finite(
      {QuadraticConstraint{RealMat::Identity(2, 2), RealVec::Zero(2), 0.25, 0}}, spec.base_set);
  for (Method m : {Method::kKorpelevich, Method::kPopov}) {
    SolverConfig cfg = base_config(m, 50);
    cfg.record_iterates = true;
    StochasticOracle o(spec, SeededStream(1, 1));
    const RealVec xs = RealVec::Zero(2);
    if (m == Method::kKorpelevich) {
      auto s = korpelevich_step(xs, 0.3, o);
      CHECK(s.v == xs);
    } else {
      auto s = popov_step(xs, map_mean(spec, xs), 0.3, o);
      CHECK(s.v == xs);
    }
    SeededStream r(1, 2);
    CHECK(random_feasibility_pass(xs, 10, spec.family, 1.0, spec.base_set, r).x == xs);
  }
}

TEST_CASE("observer sees every iteration in order") {
  const ProblemSpec spec = game(4, 20);
  SolverConfig cfg = base_config(Method::kPopov, 30);
  int last = 0;
  cfg.observer = [&](const IterationRecord& r) {
    CHECK(r.k == last + 1);
    last = r.k;
  };
  run_solver(spec, cfg);
  CHECK(last == 30);
}

TEST_CASE("record_errors stores squared noise") {
  const ProblemSpec spec = game(5, 20);
  SolverConfig cfg = base_config(Method::kKorpelevich, 2000);
  cfg.record_errors = true;
  const SolverTrace tr = run_solver(spec, cfg);
  double s = 0.0;
  for (const auto& r : tr.iterations) s += r.err1_sq + r.err2_sq;
  CHECK(s / (2.0 * tr.iterations.size()) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::isnan(run_solver(spec, base_config(Method::kKorpelevich, 3)).iterations[0].err1_sq));
}

TEST_CASE("failures carry the iteration") {
  const ProblemSpec spec = game(6, 20);
  SolverConfig cfg = base_config(Method::kKorpelevich, 10);
  cfg.observer = [](const IterationRecord& r) {
    if (r.k == 4) throw InvalidInput("boom");
  };
  try {
    run_solver(spec, cfg);
    FAIL("expected a failure");
  } catch (const RunFailure& e) {
    CHECK(e.iteration() == 4);
  }
  SolverConfig bad = base_config(Method::kPopov, 0);
  CHECK_THROWS_AS(run_solver(spec, bad), ConfigError);
  bad.horizon = 5;
  bad.feas.beta = 2.0;
  CHECK_THROWS_AS(run_solver(spec, bad), ConfigError);
}
