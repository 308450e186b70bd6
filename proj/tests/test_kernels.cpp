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

#include <omp.h>

#include "rfvi/errors.hpp"
#include "rfvi/kernels.hpp"

using namespace rfvi;

namespace {

struct Data {
  ProblemSpec spec;
  RealMat points;
};

Data make_data(Eigen::Index n) {
  SeededStream rng(21, 0);
  SeededStream g = rng.split(0);
  Data d{make_zero_sum_game(2, 500, g), RealMat()};
  d.points.resize(4, n);
  for (Eigen::Index j = 0; j < n; ++j) d.points.col(j) = sample_uniform_box(d.spec.base_set, rng);
  return d;
}

}  // namespace

TEST_CASE("positive_part_sum") {
  const std::vector<double> v{1.0, -2.0, 3.0, 0.0};
  CHECK(kernels::positive_part_sum(v) == 4.0);
  CHECK(kernels::positive_part_sum({}) == 0.0);
}

TEST_CASE("serial and OpenMP kernels agree bitwise across thread counts") {
  const Data d = make_data(3000);
  const auto& cons = d.spec.family.members();
  const RealMat slopes = *d.spec.oracle.matrix * d.points;
  RealVec offsets(d.points.cols());
  for (Eigen::Index j = 0; j < d.points.cols(); ++j) offsets[j] = slopes.col(j).dot(d.points.col(j));
  const RealVec y = d.points.col(7);
  const RealVec x = d.points.col(11);

  const double ref_max = kernels::serial::max_affine(slopes, offsets, y);
  const auto ref_mask = kernels::serial::feasible_mask(cons, d.points);
  std::vector<double> ref_vals(cons.size());
  kernels::serial::constraint_values(cons, x, ref_vals);
  const RealMat ref_map = kernels::serial::map_columns(d.spec.oracle.mean_map, d.points);

  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    CHECK(kernels::omp::max_affine(slopes, offsets, y) == ref_max);
    CHECK(kernels::omp::feasible_mask(cons, d.points) == ref_mask);
    std::vector<double> vals(cons.size());
    kernels::omp::constraint_values(cons, x, vals);
    CHECK(vals == ref_vals);
    CHECK(kernels::omp::map_columns(d.spec.oracle.mean_map, d.points) == ref_map);
  }
  omp_set_num_threads(saved);
}

TEST_CASE("kernels against direct loops") {
  const Data d = make_data(200);
  const auto& cons = d.spec.family.members();
  const auto mask = kernels::omp::feasible_mask(cons, d.points);
  for (Eigen::Index j = 0; j < d.points.cols(); ++j) {
    CHECK((mask[static_cast<std::size_t>(j)] == 1) == d.spec.family.satisfied_by(d.points.col(j)));
  }
  std::vector<double> vals(cons.size());
  kernels::omp::constraint_values(cons, d.points.col(0), vals);
  for (std::size_t i = 0; i < cons.size(); ++i) CHECK(vals[i] == constraint_value(cons[i], d.points.col(0)));
}

TEST_CASE("kernel errors propagate out of parallel regions") {
  const Data d = make_data(10);
  std::vector<QuadraticConstraint> bad{QuadraticConstraint::affine(RealVec::Ones(3), 0.0, 3)};
  CHECK_THROWS_AS(kernels::omp::feasible_mask(bad, d.points), InvalidInput);
  std::vector<double> out(1);
  CHECK_THROWS_AS(kernels::omp::constraint_values(bad, d.points.col(0), out), InvalidInput);
  std::vector<double> wrong(2);
  CHECK_THROWS_AS(kernels::omp::constraint_values(bad, d.points.col(0), wrong), InvalidInput);
  const kernels::MapFn thrower = [](const RealVec&) -> RealVec { throw ContractViolation("x"); };
  CHECK_THROWS_AS(kernels::omp::map_columns(thrower, d.points), ContractViolation);
  CHECK_THROWS_AS(kernels::omp::max_affine(RealMat::Zero(2, 3), RealVec::Zero(2), RealVec::Zero(2)), InvalidInput);
}
