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

// Numeric substrate shared by every module: dense vectors, seeded random
// streams, box geometry, power-method norm estimation and random symmetric
// matrices with a prescribed spectrum.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace rfvi {

using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

bool all_finite(const RealVec& x);
// Throws InvalidInput naming `what` when x carries NaN or Inf.
void require_finite(const RealVec& x, const char* what);

/// Reproducible random stream identified by (master_seed, stream_id).
///
/// The pair is mixed through splitmix64 before seeding the engine, so
/// neighbouring ids give unrelated streams. `split` derives a child stream
/// deterministically, which lets a single master seed fan out into the
/// independent streams of a multi-seed experiment.
class SeededStream {
 public:
  SeededStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  SeededStream split(std::uint64_t child_id) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01();
  double uniform(double lo, double hi);
  double normal(double stddev);
  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Axis-aligned box {x : lo <= x <= hi}.
class BoxSet {
 public:
  BoxSet(RealVec lo, RealVec hi);
  static BoxSet cube(Eigen::Index dim, double lo, double hi);

  Eigen::Index dim() const { return lo_.size(); }
  const RealVec& lo() const { return lo_; }
  const RealVec& hi() const { return hi_; }

  bool contains(const RealVec& x, double tol = 0.0) const;
  // Squared diameter sum (hi - lo)^2; this is the D of the rate bounds.
  double diameter_sq() const;
  // max_{x in box} ||x||, the radius of the smallest origin-centred ball
  // containing the box. Restricted to coordinates [offset, offset + len).
  double max_norm(Eigen::Index offset, Eigen::Index len) const;
  double max_norm() const { return max_norm(0, dim()); }

 private:
  RealVec lo_;
  RealVec hi_;
};

RealVec project_box(const RealVec& x, const BoxSet& box);
RealVec sample_uniform_box(const BoxSet& box, SeededStream& rng);
RealVec gaussian_vector(Eigen::Index dim, double stddev, SeededStream& rng);

inline constexpr int kDefaultPowerIters = 200;

// Largest singular value of `m` by power iteration on m^T m from a random
// unit start. Returns 0 for the zero matrix.
double spectral_norm_power(const RealMat& m, int iters, SeededStream& rng);

// Q diag(eigs) Q^T with Q the orthogonal factor of the QR decomposition of
// a Gaussian random matrix. The result is exactly symmetric.
RealMat random_sym_with_spectrum(const RealVec& eigs, SeededStream& rng);

}  // namespace rfvi
