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

#include <algorithm>
#include <limits>

#include "rfvi/errors.hpp"
#include "rfvi/kernels.hpp"

namespace rfvi::kernels {

double positive_part_sum(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += std::max(v, 0.0);
  return s;
}

namespace serial {

double max_affine(const RealMat& slopes, const RealVec& offsets, const RealVec& y) {
  if (slopes.cols() != offsets.size() || slopes.rows() != y.size()) {
    throw InvalidInput("max_affine: dimension mismatch");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < slopes.cols(); ++j) {
    best = std::max(best, slopes.col(j).dot(y) - offsets[j]);
  }
  return best;
}

void constraint_values(const std::vector<QuadraticConstraint>& cons, const RealVec& x, std::span<double> out) {
  if (out.size() != cons.size()) throw InvalidInput("constraint_values: output size mismatch");
  for (std::size_t i = 0; i < cons.size(); ++i) out[i] = constraint_value(cons[i], x);
}

std::vector<std::uint8_t> feasible_mask(const std::vector<QuadraticConstraint>& cons, const RealMat& points) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(points.cols()), 1);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const RealVec p = points.col(j);
    for (const auto& con : cons) {
      if (constraint_value(con, p) > 0.0) {
        mask[static_cast<std::size_t>(j)] = 0;
        break;
      }
    }
  }
  return mask;
}

RealMat map_columns(const MapFn& map, const RealMat& points) {
  if (points.cols() == 0) return RealMat(points.rows(), 0);
  RealMat out(map(points.col(0)).size(), points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) out.col(j) = map(points.col(j));
  return out;
}

}  // namespace serial
}  // namespace rfvi::kernels
