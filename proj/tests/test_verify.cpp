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

#include <algorithm>
#include <cmath>

#include "rfvi/errors.hpp"
#include "rfvi/verify.hpp"

using namespace rfvi;
using namespace rfvi::verify;

namespace {

WitnessedProblem wedge() {
  return make_box_halfspace_problem(BoxSet::cube(2, -1.0, 1.0),
                                    {Halfspace{RealVec{{1.0, 0.2}}, 0.1}, Halfspace{RealVec{{-0.3, 1.0}}, 0.2}});
}

}  // namespace

TEST_CASE("exact polygon projection against the analytic halfspace projection") {
  const BoxSet box = BoxSet::cube(2, -1.0, 1.0);
  const RealVec a = RealVec{{1.0, 1.0}} / std::sqrt(2.0);
  const RealVec x{{0.5, 0.3}};
  CHECK((project_polygon_2d(x, box, {{a, 0.0}}) - RealVec{{0.1, -0.1}}).norm() <= 1e-15);
  CHECK(project_polygon_2d(RealVec{{-0.5, 0.2}}, box, {{a, 0.0}}) == RealVec{{-0.5, 0.2}});
  CHECK_THROWS_AS(project_polygon_2d(x, box, {{a, -5.0}}), InvalidInput);
}

TEST_CASE("brute_force_projection_grid") {
  const WitnessedProblem wp = wedge();
  const RealVec feasible = wp.witness;
  const RealVec g = brute_force_projection_grid(feasible, wp, 0.01);
  CHECK((g - feasible).norm() <= 0.01 * std::sqrt(2.0));

  SeededStream rng(1, 0);
  double worst_coarse = 0.0, worst_fine = 0.0;
  for (int i = 0; i < 20; ++i) {
    const WitnessedProblem hp = random_box_halfspace_problem(rng);
    const RealVec x = sample_uniform_box(BoxSet::cube(2, -1.5, 1.5), rng);
    const double exact = (hp.projection(x) - x).norm();
    const double coarse = (brute_force_projection_grid(x, hp, 0.02) - x).norm();
    const double fine = (brute_force_projection_grid(x, hp, 0.01) - x).norm();
    CHECK(coarse >= exact - 1e-12);
    CHECK(fine >= exact - 1e-12);
    worst_coarse = std::max(worst_coarse, coarse - exact);
    worst_fine = std::max(worst_fine, fine - exact);
  }
  CHECK(worst_coarse <= 0.02 * std::sqrt(2.0));
  CHECK(worst_fine <= 0.01 * std::sqrt(2.0));
  CHECK_THROWS_AS(brute_force_projection_grid(RealVec::Zero(2), wp, 0.0), InvalidInput);
}

TEST_CASE("finite_diff_subgrad_check") {
  const auto aff = QuadraticConstraint::affine(RealVec{{1.0, -2.0}}, -1.0);
  CHECK(finite_diff_subgrad_check(aff, RealVec{{0.5, 0.1}}, 1e-5) <= 1e-9);

  SeededStream rng(2, 0);
  QuadraticConstraint q;
  q.B = random_sym_with_spectrum(RealVec{{0.5, 1.7}}, rng);
  q.c = RealVec{{1.0, 1.0}};
  q.d = -1.0;
  const RealVec x{{0.6, 0.4}};
  const double e3 = finite_diff_subgrad_check(q, x, 1e-3);
  const double e5 = finite_diff_subgrad_check(q, x, 1e-5);
  // Central differences are exact on quadratics, so only roundoff remains.
  CHECK(e3 <= 1e-9);
  CHECK(e5 <= 1e-6);
  QuadraticConstraint slack = q;
  slack.d = 5.0;
  CHECK_THROWS_AS(finite_diff_subgrad_check(slack, RealVec::Zero(2), 1e-5), InvalidInput);
}

TEST_CASE("pass inequality on game runs") {
  SeededStream rng(3, 0);
  SeededStream g = rng.split(0);
  SeededStream w = rng.split(1);
  WitnessedProblem wp = with_witness(make_zero_sum_game(2, 1000, g), 10000, w);
  CHECK(wp.spec.family.satisfied_by(wp.witness));
  CHECK(wp.spec.base_set.contains(wp.witness));

  SolverConfig cfg;
  cfg.horizon = 500;
  cfg.feas.beta = 0.7;
  const SolverTrace tr = run_solver(wp.spec, cfg);
  const auto rep = check_pass_inequality(tr, wp, 0.7, wp.spec.family.subgrad_bound());
  CHECK(rep.worst_relative <= 1e-10);

  SolverTrace corrupted = tr;
  const double mg = wp.spec.family.subgrad_bound();
  std::size_t idx = 0;
  while (idx < corrupted.iterations.size()) {
    const auto& r = corrupted.iterations[idx].sq_residuals;
    if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; })) break;
    ++idx;
  }
  REQUIRE(idx < corrupted.iterations.size());
  corrupted.iterations[idx].sq_residuals[0] += 1.0;
  const auto bad = check_pass_inequality(corrupted, wp, 0.7, mg);
  CHECK(bad.worst_abs == doctest::Approx(0.7 * 1.3 / (mg * mg)).epsilon(1e-9));

  SolverTrace stripped = tr;
  stripped.iterations[3].sq_residuals.clear();
  CHECK_THROWS_AS(check_pass_inequality(stripped, wp, 0.7, mg), InvalidInput);
}

TEST_CASE("pass inequality with a feasible start reduces to equality") {
  WitnessedProblem wp = make_box_halfspace_problem(BoxSet::cube(2, -1.0, 1.0), {Halfspace{RealVec{{1.0, 0.0}}, 2.0}});
  SolverConfig cfg;
  cfg.horizon = 50;
  const SolverTrace tr = run_solver(wp.spec, cfg);
  for (const auto& r : tr.iterations) {
    for (double s : r.sq_residuals) CHECK(s == 0.0);
  }
  CHECK(check_pass_inequality(tr, wp, 1.0, 1.0).worst_abs <= 1e-12);
}

TEST_CASE("check_polyak_inequality") {
  SeededStream rng(4, 0);
  CHECK(check_polyak_inequality(2000, rng) <= 1e-12);
}

TEST_CASE("feasibility decay") {
  const WitnessedProblem one =
      make_box_halfspace_problem(BoxSet::cube(2, -1.0, 1.0), {Halfspace{RealVec{{1.0, 1.0}} / std::sqrt(2.0), -0.3}});
  const DecayReport exact = check_feasibility_decay(one, 1.0, {1, 2, 3}, 20, 5);
  CHECK(exact.mean_dist[0] <= 1e-15 + kDistFloor);

  std::vector<int> ns;
  for (int n = 1; n <= 30; ++n) ns.push_back(n);
  const DecayReport half = check_feasibility_decay(one, 0.5, ns, 200, 6);
  CHECK(half.fit.slope < 0.0);
  CHECK(half.fit.r2 >= 0.9);
  for (std::size_t i = 1; i < half.mean_dist.size(); ++i) CHECK(half.mean_dist[i] <= half.mean_dist[i - 1]);

  const WitnessedProblem w = wedge();
  std::vector<int> short_ns{1, 2, 3, 4, 5, 6, 7, 8};
  const double s05 = check_feasibility_decay(w, 0.5, short_ns, 200, 7).fit.slope;
  const double s10 = check_feasibility_decay(w, 1.0, short_ns, 200, 7).fit.slope;
  const double s15 = check_feasibility_decay(w, 1.5, short_ns, 200, 7).fit.slope;
  MESSAGE("decay slopes beta 0.5/1.0/1.5: " << s05 << " " << s10 << " " << s15);
  CHECK(s10 <= s05);
}

TEST_CASE("pass vs Dykstra") { CHECK(check_pass_vs_dykstra(20, 500, 1.0, 8) <= 1e-3); }

TEST_CASE("sequence bounds") {
  const auto t1 = sequence_bounds_table(1.0, {1});
  CHECK(t1[0].sum_alpha == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(t1[0].sum_alpha >= t1[0].sum_alpha_bound);
  CHECK(t1[0].sum_alpha_sq == doctest::Approx(0.5));
  CHECK(t1[0].sum_alpha_sq <= std::log(3.0));
  CHECK(check_sequence_bounds(10.0, {10000}));

  // Direct summation for T = 2: 1/alpha_1 + 1/alpha_2 = 10 (sqrt 2 + sqrt 3).
  const auto t2 = sequence_bounds_table(0.1, {2});
  const double direct = 10.0 * (std::sqrt(2.0) + std::sqrt(3.0));
  CHECK(t2[0].sum_inv_alpha == doctest::Approx(direct));
  CHECK(direct >= 10.0 * (std::sqrt(1.5) - 2.0 / 3.0) * std::pow(2.0, 1.5));
  for (double ab : {0.1, 1.0, 10.0}) CHECK(check_sequence_bounds(ab, {1, 2, 10, 100, 10000}));
  CHECK_THROWS_AS(sequence_bounds_table(0.0, {1}), InvalidInput);
}

TEST_CASE("verification suite report") {
  const auto results = run_verification_suite(1);
  CHECK(results.size() >= 8);
  for (const auto& r : results) CHECK_MESSAGE(r.passed, r.name << " measured " << r.measured);
  const std::string js = report_json(results);
  CHECK(js.find("\"status\": \"pass\"") != std::string::npos);
  CHECK(js.find("\"threshold\"") != std::string::npos);
}
