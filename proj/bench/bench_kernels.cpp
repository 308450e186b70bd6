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

#include <benchmark/benchmark.h>

#include <map>

#include "rfvi/kernels.hpp"
#include "rfvi/problem.hpp"

namespace {

using namespace rfvi;

struct Fixture {
  ProblemSpec spec;
  RealMat points;
  RealMat slopes;
  RealVec offsets;
  RealVec y;

  explicit Fixture(Eigen::Index n_points) {
    SeededStream rng(7, 0);
    SeededStream game_rng = rng.split(0);
    spec = make_zero_sum_game(2, 1000, game_rng);
    points.resize(spec.dim(), n_points);
    for (Eigen::Index j = 0; j < n_points; ++j) points.col(j) = sample_uniform_box(spec.base_set, rng);
    slopes = *spec.oracle.matrix * points;
    offsets.resize(n_points);
    for (Eigen::Index j = 0; j < n_points; ++j) offsets[j] = slopes.col(j).dot(points.col(j));
    y = sample_uniform_box(spec.base_set, rng);
  }
};

const Fixture& fixture(Eigen::Index n) {
  static std::map<Eigen::Index, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Fixture(n)).first;
  return it->second;
}

template <bool Omp>
void BM_MaxAffine(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) {
    double v = Omp ? kernels::omp::max_affine(f.slopes, f.offsets, f.y)
                   : kernels::serial::max_affine(f.slopes, f.offsets, f.y);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Omp>
void BM_FeasibleMask(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) {
    auto m = Omp ? kernels::omp::feasible_mask(f.spec.family.members(), f.points)
                 : kernels::serial::feasible_mask(f.spec.family.members(), f.points);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Omp>
void BM_ConstraintValues(benchmark::State& state) {
  const Fixture& f = fixture(16);
  std::vector<double> out(f.spec.family.size());
  const RealVec x = f.points.col(0);
  for (auto _ : state) {
    if (Omp) {
      kernels::omp::constraint_values(f.spec.family.members(), x, out);
    } else {
      kernels::serial::constraint_values(f.spec.family.members(), x, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Omp>
void BM_MapColumns(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  const kernels::MapFn map = f.spec.oracle.mean_map;
  for (auto _ : state) {
    RealMat r = Omp ? kernels::omp::map_columns(map, f.points) : kernels::serial::map_columns(map, f.points);
    benchmark::DoNotOptimize(r.data());
  }
}

}  // namespace

BENCHMARK(BM_MaxAffine<false>)->Arg(1500)->Arg(100000);
BENCHMARK(BM_MaxAffine<true>)->Arg(1500)->Arg(100000);
BENCHMARK(BM_FeasibleMask<false>)->Arg(1500)->Arg(10000);
BENCHMARK(BM_FeasibleMask<true>)->Arg(1500)->Arg(10000);
BENCHMARK(BM_ConstraintValues<false>);
BENCHMARK(BM_ConstraintValues<true>);
BENCHMARK(BM_MapColumns<false>)->Arg(1500);
BENCHMARK(BM_MapColumns<true>)->Arg(1500);

BENCHMARK_MAIN();
