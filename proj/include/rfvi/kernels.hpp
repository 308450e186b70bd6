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

// Data-parallel inner loops of the evaluation path. Each kernel exists twice:
// `serial` is the reference implementation kept for tests, `omp` is the
// OpenMP version used by the library. Both produce bit-identical results:
// parallel loops only write disjoint slots and every floating-point sum is
// accumulated serially in index order.
//
// Point sets are stored column-wise (one point per column).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rfvi/problem.hpp"

namespace rfvi::kernels {

using MapFn = std::function<RealVec(const RealVec&)>;

// Order-preserving sum of max(v_i, 0).
double positive_part_sum(std::span<const double> values);

namespace serial {

// max_j (<slopes_j, y> - offsets_j).
double max_affine(const RealMat& slopes, const RealVec& offsets, const RealVec& y);
// out[i] = g_i(x).
void constraint_values(const std::vector<QuadraticConstraint>& cons, const RealVec& x, std::span<double> out);
// mask[j] = 1 iff column j satisfies every constraint (g <= 0).
std::vector<std::uint8_t> feasible_mask(const std::vector<QuadraticConstraint>& cons, const RealMat& points);
// Column j of the result is map(points.col(j)).
RealMat map_columns(const MapFn& map, const RealMat& points);

}  // namespace serial

namespace omp {

double max_affine(const RealMat& slopes, const RealVec& offsets, const RealVec& y);
void constraint_values(const std::vector<QuadraticConstraint>& cons, const RealVec& x, std::span<double> out);
std::vector<std::uint8_t> feasible_mask(const std::vector<QuadraticConstraint>& cons, const RealMat& points);
RealMat map_columns(const MapFn& map, const RealMat& points);

int max_threads();

}  // namespace omp

}  // namespace rfvi::kernels
