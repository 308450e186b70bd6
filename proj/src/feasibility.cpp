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

#include "rfvi/feasibility.hpp"

#include <algorithm>
#include <cmath>

#include "rfvi/errors.hpp"

namespace rfvi {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Smallest integer n >= 1 with n^r >= k.
long long ceil_root(long long k, double r) {
  long long n = std::max(1LL, static_cast<long long>(std::ceil(std::pow(static_cast<double>(k), 1.0 / r))));
  while (n > 1 && std::pow(static_cast<double>(n - 1), r) >= static_cast<double>(k)) --n;
  while (std::pow(static_cast<double>(n), r) < static_cast<double>(k)) ++n;
  return n;
}

// Smallest integer n >= 0 with m^n >= k.
long long ceil_log(long long k, double m) {
  long long n = std::max(0LL, static_cast<long long>(std::ceil(std::log(static_cast<double>(k)) / std::log(m))));
  while (n > 0 && std::pow(m, static_cast<double>(n - 1)) >= static_cast<double>(k)) --n;
  while (std::pow(m, static_cast<double>(n)) < static_cast<double>(k)) ++n;
  return n;
}

int to_int(long long n) {
  if (n > 1'000'000'000LL) throw ConfigError("sample count overflow");
  return static_cast<int>(n);
}

}  // namespace

void validate_schedule(const SampleSchedule& schedule) {
  std::visit(Overloaded{
                 [](const ConstantSamples& s) {
                   if (s.n < 1) throw ConfigError("schedule: constant N must be >= 1");
                 },
                 [](const RootGrowth& s) {
                   if (!(s.r >= 1.0)) throw ConfigError("schedule: root exponent r must be >= 1");
                 },
                 [](const LogGrowth& s) {
                   if (!(s.m > 1.0)) throw ConfigError("schedule: log base m must be > 1");
                 },
                 [](const MaxConstRoot& s) {
                   if (s.n < 1) throw ConfigError("schedule: constant N must be >= 1");
                   if (!(s.r >= 1.0)) throw ConfigError("schedule: root exponent r must be >= 1");
                 },
             },
             schedule);
}

int sample_count(const SampleSchedule& schedule, long long k) {
  if (k < 1) throw InvalidInput("sample_count: k must be >= 1");
  validate_schedule(schedule);
  return std::visit(Overloaded{
                        [](const ConstantSamples& s) { return s.n; },
                        [k](const RootGrowth& s) { return to_int(ceil_root(k, s.r)); },
                        [k](const LogGrowth& s) { return to_int(std::max(1LL, ceil_log(k, s.m))); },
                        [k](const MaxConstRoot& s) { return std::max(s.n, to_int(ceil_root(k, s.r))); },
                    },
                    schedule);
}

void FeasibilityConfig::validate() const {
  if (!(beta > 0.0 && beta < 2.0)) {
    throw ConfigError("beta must lie in the open interval (0, 2), got " + std::to_string(beta));
  }
  validate_schedule(schedule);
}

RealVec polyak_step(const RealVec& z, double gplus, const RealVec& d, double beta, const BoxSet& box) {
  if (gplus <= 0.0) return z;
  const double dd = d.squaredNorm();
  if (dd == 0.0) throw DegenerateSubgradient("positive constraint violation with a zero subgradient");
  return project_box(z - (beta * gplus / dd) * d, box);
}

FeasibilityPass random_feasibility_pass(const RealVec& v, int n, const ConstraintFamily& family,
                                        double beta, const BoxSet& box, SeededStream& rng) {
  if (n < 1) throw InvalidInput("feasibility pass needs N >= 1");
  FeasibilityPass out{v, {}, {}};
  if (family.empty()) return out;
  out.sq_residuals.reserve(n);
  out.sq_subgrad_norms.reserve(n);
  for (int i = 0; i < n; ++i) {
    PlusSubgradient ps;
    if (family.is_finite()) {
      ps = constraint_plus_subgradient(family.draw_ref(rng), out.x);
    } else {
      ps = constraint_plus_subgradient(family.draw(rng), out.x);
    }
    out.sq_residuals.push_back(ps.gplus * ps.gplus);
    if (ps.gplus > 0.0) {
      out.sq_subgrad_norms.push_back(ps.d.squaredNorm());
      out.x = polyak_step(out.x, ps.gplus, ps.d, beta, box);
    } else {
      out.sq_subgrad_norms.push_back(0.0);
    }
  }
  return out;
}

ContractionFactor compute_q(double beta, double c, double subgrad_bound) {
  if (!(beta > 0.0 && beta < 2.0)) throw ConfigError("compute_q: beta must lie in (0, 2)");
  if (!(c > 0.0)) throw ConfigError("compute_q: regularity constant must be positive");
  if (!(subgrad_bound > 0.0)) throw ConfigError("compute_q: subgradient bound must be positive");
  const double q = beta * (2.0 - beta) / (c * subgrad_bound * subgrad_bound);
  if (q > 1.0) return {1.0, true};
  return {q, false};
}

}  // namespace rfvi
