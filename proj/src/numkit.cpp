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

#include "rfvi/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfvi/errors.hpp"

namespace rfvi {

bool all_finite(const RealVec& x) { return x.allFinite(); }

void require_finite(const RealVec& x, const char* what) {
  if (!x.allFinite()) {
    throw InvalidInput(std::string(what) + " has non-finite entries");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t id) {
  const std::uint64_t a = splitmix64(master);
  const std::uint64_t b = splitmix64(a ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SeededStream::SeededStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id), engine_(make_engine(master_seed, stream_id)) {}

SeededStream SeededStream::split(std::uint64_t child_id) const {
  return SeededStream(master_seed_, splitmix64(stream_id_ * 0x100000001b3ULL + child_id + 1));
}

double SeededStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double SeededStream::normal(double stddev) { return stddev * normal_(engine_); }

std::size_t SeededStream::index(std::size_t n) {
  if (n == 0) throw InvalidInput("index: empty range");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

BoxSet::BoxSet(RealVec lo, RealVec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw InvalidInput("box bounds have different dimensions");
  require_finite(lo_, "box lower bound");
  require_finite(hi_, "box upper bound");
  if ((lo_.array() > hi_.array()).any()) throw InvalidInput("box lower bound exceeds upper bound");
}

BoxSet BoxSet::cube(Eigen::Index dim, double lo, double hi) {
  return BoxSet(RealVec::Constant(dim, lo), RealVec::Constant(dim, hi));
}

bool BoxSet::contains(const RealVec& x, double tol) const {
  if (x.size() != dim()) return false;
  return ((x.array() >= lo_.array() - tol) && (x.array() <= hi_.array() + tol)).all();
}

double BoxSet::diameter_sq() const { return (hi_ - lo_).squaredNorm(); }

double BoxSet::max_norm(Eigen::Index offset, Eigen::Index len) const {
  if (offset < 0 || len < 0 || offset + len > dim()) throw InvalidInput("max_norm: block out of range");
  double s = 0.0;
  for (Eigen::Index i = offset; i < offset + len; ++i) {
    const double m = std::max(std::abs(lo_[i]), std::abs(hi_[i]));
    s += m * m;
  }
  return std::sqrt(s);
}

RealVec project_box(const RealVec& x, const BoxSet& box) {
  if (x.size() != box.dim()) {
    throw InvalidInput("project_box: dimension " + std::to_string(x.size()) + " vs box " +
                       std::to_string(box.dim()));
  }
  return x.cwiseMax(box.lo()).cwiseMin(box.hi());
}

RealVec sample_uniform_box(const BoxSet& box, SeededStream& rng) {
  RealVec x(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i) x[i] = rng.uniform(box.lo()[i], box.hi()[i]);
  return x;
}

RealVec gaussian_vector(Eigen::Index dim, double stddev, SeededStream& rng) {
  if (!(stddev >= 0.0)) throw InvalidInput("gaussian_vector: stddev must be nonnegative");
  if (dim < 0) throw InvalidInput("gaussian_vector: negative dimension");
  RealVec x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = rng.normal(stddev);
  return x;
}

double spectral_norm_power(const RealMat& m, int iters, SeededStream& rng) {
  if (iters < 1) throw InvalidInput("spectral_norm_power: iters must be >= 1");
  if (m.size() == 0 || m.isZero(0.0)) return 0.0;

  RealVec v = gaussian_vector(m.cols(), 1.0, rng);
  double nv = v.norm();
  while (nv == 0.0) {
    v = gaussian_vector(m.cols(), 1.0, rng);
    nv = v.norm();
  }
  v /= nv;

  double estimate = (m * v).norm();
  for (int it = 0; it < iters; ++it) {
    RealVec w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) break;  // start vector in the null space
    v = w / nw;
    estimate = std::max(estimate, (m * v).norm());
  }
  return estimate;
}

RealMat random_sym_with_spectrum(const RealVec& eigs, SeededStream& rng) {
  if (eigs.size() == 0) throw InvalidInput("random_sym_with_spectrum: empty spectrum");
  require_finite(eigs, "spectrum");
  const Eigen::Index n = eigs.size();
  RealMat g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.normal(1.0);
  const Eigen::HouseholderQR<RealMat> qr(g);
  const RealMat q = qr.householderQ() * RealMat::Identity(n, n);
  RealMat s = q * eigs.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

}  // namespace rfvi
