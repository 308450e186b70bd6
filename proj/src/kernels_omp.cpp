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

#include <omp.h>

#include <algorithm>
#include <exception>
#include <limits>

#include "rfvi/errors.hpp"
#include "rfvi/kernels.hpp"

namespace rfvi::kernels::omp {

namespace {

// Exceptions must not cross an OpenMP region boundary; the first one is
// captured and rethrown after the join.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(rfvi_exception_slot)
      if (!eptr_) eptr_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (eptr_) std::rethrow_exception(eptr_);
  }

 private:
  std::exception_ptr eptr_;
};

}  // namespace

int max_threads() { return omp_get_max_threads(); }

double max_affine(const RealMat& slopes, const RealVec& offsets, const RealVec& y) {
  if (slopes.cols() != offsets.size() || slopes.rows() != y.size()) {
    throw InvalidInput("max_affine: dimension mismatch");
  }
  const Eigen::Index n = slopes.cols();
  double best = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : best)
  for (Eigen::Index j = 0; j < n; ++j) {
    best = std::max(best, slopes.col(j).dot(y) - offsets[j]);
  }
  return best;
}

void constraint_values(const std::vector<QuadraticConstraint>& cons, const RealVec& x, std::span<double> out) {
  if (out.size() != cons.size()) throw InvalidInput("constraint_values: output size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(cons.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    slot.run([&] { out[static_cast<std::size_t>(i)] = constraint_value(cons[static_cast<std::size_t>(i)], x); });
  }
  slot.rethrow();
}

std::vector<std::uint8_t> feasible_mask(const std::vector<QuadraticConstraint>& cons, const RealMat& points) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(points.cols()), 1);
  const Eigen::Index n = points.cols();
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index j = 0; j < n; ++j) {
    slot.run([&] {
      const RealVec p = points.col(j);
      for (const auto& con : cons) {
        if (constraint_value(con, p) > 0.0) {
          mask[static_cast<std::size_t>(j)] = 0;
          break;
        }
      }
    });
  }
  slot.rethrow();
  return mask;
}

RealMat map_columns(const MapFn& map, const RealMat& points) {
  if (points.cols() == 0) return RealMat(points.rows(), 0);
  RealMat out(map(points.col(0)).size(), points.cols());
  const Eigen::Index n = points.cols();
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    slot.run([&] { out.col(j) = map(points.col(j)); });
  }
  slot.rethrow();
  return out;
}

}  // namespace rfvi::kernels::omp
