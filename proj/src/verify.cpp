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

#include "rfvi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "rfvi/errors.hpp"
#include "rfvi/feasibility.hpp"
#include "rfvi/kernels.hpp"

namespace rfvi::verify {

namespace {

using Polygon = std::vector<Eigen::Vector2d>;

Polygon clip(const Polygon& poly, const Halfspace& h) {
  Polygon out;
  const Eigen::Vector2d a(h.a[0], h.a[1]);
  auto inside = [&](const Eigen::Vector2d& p) { return a.dot(p) <= h.b; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& cur = poly[i];
    const Eigen::Vector2d& nxt = poly[(i + 1) % poly.size()];
    const bool ci = inside(cur), ni = inside(nxt);
    if (ci) out.push_back(cur);
    if (ci != ni) {
      const double t = (h.b - a.dot(cur)) / a.dot(nxt - cur);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

Polygon clipped_box(const BoxSet& box, const std::vector<Halfspace>& halfspaces) {
  if (box.dim() != 2) throw InvalidInput("polygon oracle is two-dimensional");
  const double x0 = box.lo()[0], y0 = box.lo()[1], x1 = box.hi()[0], y1 = box.hi()[1];
  Polygon poly{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  for (const auto& h : halfspaces) {
    if (h.a.size() != 2) throw InvalidInput("polygon oracle needs 2D halfspaces");
    poly = clip(poly, h);
    if (poly.empty()) throw InvalidInput("box and halfspaces have empty intersection");
  }
  return poly;
}

Eigen::Vector2d project_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace

WitnessedProblem with_witness(ProblemSpec spec, std::size_t n_candidates, SeededStream& rng) {
  for (std::size_t i = 0; i < n_candidates; ++i) {
    RealVec x = sample_uniform_box(spec.base_set, rng);
    if (spec.family.satisfied_by(x)) return WitnessedProblem{std::move(spec), std::move(x), {}};
  }
  throw EmptyCloud("no feasible witness among " + std::to_string(n_candidates) + " candidates");
}

RealVec project_polygon_2d(const RealVec& x, const BoxSet& box, const std::vector<Halfspace>& halfspaces) {
  if (x.size() != 2) throw InvalidInput("project_polygon_2d: point must be 2D");
  bool feasible = box.contains(x);
  for (const auto& h : halfspaces) feasible = feasible && h.a.dot(x) <= h.b;
  if (feasible) return x;

  const Polygon poly = clipped_box(box, halfspaces);
  const Eigen::Vector2d p(x[0], x[1]);
  Eigen::Vector2d best = poly.front();
  double best_d = (p - best).squaredNorm();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d q = project_segment(p, poly[i], poly[(i + 1) % poly.size()]);
    const double d = (p - q).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return RealVec{{best[0], best[1]}};
}

WitnessedProblem make_box_halfspace_problem(const BoxSet& box, const std::vector<Halfspace>& halfspaces) {
  const Polygon poly = clipped_box(box, halfspaces);
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& v : poly) centroid += v;
  centroid /= static_cast<double>(poly.size());

  std::vector<QuadraticConstraint> cons;
  double mg = 0.0;
  for (const auto& h : halfspaces) {
    cons.push_back(QuadraticConstraint::affine(h.a, h.b));
    mg = std::max(mg, h.a.norm());
  }
  WitnessedProblem wp;
  wp.spec.base_set = box;
  wp.spec.oracle = MappingOracle::zero(2);
  wp.spec.family = ConstraintFamily::finite(std::move(cons), mg);
  wp.witness = RealVec{{centroid[0], centroid[1]}};
  wp.projection = [box, halfspaces](const RealVec& x) { return project_polygon_2d(x, box, halfspaces); };
  return wp;
}

WitnessedProblem random_box_halfspace_problem(SeededStream& rng) {
  const double theta = rng.uniform(0.0, 2.0 * M_PI);
  RealVec a{{std::cos(theta), std::sin(theta)}};
  RealVec p{{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)}};
  const double b = a.dot(p);
  return make_box_halfspace_problem(BoxSet::cube(2, -1.0, 1.0), {Halfspace{std::move(a), b}});
}

RealVec brute_force_projection_grid(const RealVec& x, const WitnessedProblem& wp, double pitch) {
  const BoxSet& box = wp.spec.base_set;
  const Eigen::Index n = box.dim();
  if (n < 1 || n > 3) throw InvalidInput("grid projection supports dimension 1 to 3");
  if (!(pitch > 0.0)) throw InvalidInput("grid pitch must be positive");

  std::vector<long long> counts(static_cast<std::size_t>(n));
  long long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    counts[i] = static_cast<long long>(std::floor((box.hi()[i] - box.lo()[i]) / pitch + 1e-9)) + 1;
    total *= counts[i];
  }
  RealVec best;
  double best_d = std::numeric_limits<double>::infinity();
  RealVec p(n);
  for (long long idx = 0; idx < total; ++idx) {
    long long rem = idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = std::min(box.lo()[i] + static_cast<double>(rem % counts[i]) * pitch, box.hi()[i]);
      rem /= counts[i];
    }
    const double d = (p - x).squaredNorm();
    if (d < best_d && wp.spec.family.satisfied_by(p)) {
      best_d = d;
      best = p;
    }
  }
  if (best.size() == 0) throw EmptyCloud("no feasible grid point");
  return best;
}

double finite_diff_subgrad_check(const QuadraticConstraint& con, const RealVec& x, double h) {
  if (!(h > 0.0)) throw InvalidInput("finite difference step must be positive");
  const PlusSubgradient ps = constraint_plus_subgradient(con, x);
  if (!(ps.gplus > 0.0)) throw InvalidInput("finite difference check needs g(x) > 0");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    RealVec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (constraint_value(con, xp) - constraint_value(con, xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - ps.d[i]));
  }
  return worst;
}

PassInequalityReport check_pass_inequality(const SolverTrace& trace, const WitnessedProblem& wp, double beta,
                                double subgrad_bound) {
  if (!(subgrad_bound > 0.0)) throw InvalidInput("pass inequality check needs a positive subgradient bound");
  const double coef = beta * (2.0 - beta) / (subgrad_bound * subgrad_bound);
  PassInequalityReport rep;
  rep.worst_abs = -std::numeric_limits<double>::infinity();
  rep.worst_relative = -std::numeric_limits<double>::infinity();
  for (const auto& rec : trace.iterations) {
    if (rec.v.size() == 0 || rec.x.size() == 0 || rec.sq_residuals.size() != static_cast<std::size_t>(rec.samples)) {
      if (!(wp.spec.family.empty() && rec.v.size() != 0)) {
        throw InvalidInput("trace is missing iterates or feasibility residuals");
      }
    }
    double sum = 0.0;
    for (double r : rec.sq_residuals) sum += r;
    const double dv = (rec.v - wp.witness).squaredNorm();
    const double lhs = (rec.x - wp.witness).squaredNorm();
    const double viol = lhs - (dv - coef * sum);
    const double rel = viol / (1.0 + dv);
    if (viol > rep.worst_abs) rep.worst_abs = viol;
    if (rel > rep.worst_relative) {
      rep.worst_relative = rel;
      rep.worst_iteration = rec.k;
    }
  }
  return rep;
}

double pass_inequality_sweep(int runs, int horizon, std::uint64_t master_seed) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < runs; ++r) {
    SeededStream rng(master_seed, static_cast<std::uint64_t>(r));
    SeededStream game_rng = rng.split(0);
    ProblemSpec spec = make_zero_sum_game(2, 1000, game_rng);
    SeededStream witness_rng = rng.split(1);
    WitnessedProblem wp = with_witness(std::move(spec), 10000, witness_rng);

    SolverConfig cfg;
    cfg.method = (r % 2 == 0) ? Method::kKorpelevich : Method::kPopov;
    cfg.steps.kind = StepKind::kDiminishing;
    cfg.steps.alpha_bar = 0.3;
    cfg.steps.cap = StepSchedule::cap_from(0.1, wp.spec.oracle.lipschitz);
    cfg.feas.beta = rng.uniform(0.05, 1.95);
    cfg.feas.schedule = RootGrowth{2.0};
    cfg.horizon = horizon;
    cfg.master_seed = rng.next_u64();
    const SolverTrace trace = run_solver(wp.spec, cfg);
    worst = std::max(worst, check_pass_inequality(trace, wp, cfg.feas.beta, wp.spec.family.subgrad_bound()).worst_relative);
  }
  return worst;
}

double check_polyak_inequality(int cases, SeededStream& rng) {
  double worst = -std::numeric_limits<double>::infinity();
  int done = 0;
  while (done < cases) {
    const auto n = static_cast<Eigen::Index>(1 + rng.index(4));
    const BoxSet box = BoxSet::cube(n, -1.0, 1.0);
    const RealVec xbar = sample_uniform_box(box, rng);
    QuadraticConstraint con;
    if (rng.uniform01() < 0.5) {
      con = QuadraticConstraint::affine(gaussian_vector(n, 1.0, rng), 0.0);
    } else {
      RealVec eigs(n);
      for (Eigen::Index i = 0; i < n; ++i) eigs[i] = rng.uniform(0.0, 2.0);
      con.B = random_sym_with_spectrum(eigs, rng);
      con.c = gaussian_vector(n, 1.0, rng);
    }
    // Shift d so that xbar is feasible with a random margin.
    con.d = xbar.dot(con.B * xbar) + con.c.dot(xbar) + rng.uniform(0.0, 0.5);

    const RealVec z = sample_uniform_box(box, rng);
    const PlusSubgradient ps = constraint_plus_subgradient(con, z);
    if (!(ps.gplus > 0.0)) continue;
    const double beta = rng.uniform(1e-3, 2.0 - 1e-3);
    const RealVec zn = polyak_step(z, ps.gplus, ps.d, beta, box);
    const double before = (z - xbar).squaredNorm();
    const double after = (zn - xbar).squaredNorm();
    const double viol = after - (before - beta * (2.0 - beta) * ps.gplus * ps.gplus / ps.d.squaredNorm());
    worst = std::max(worst, viol / (1.0 + before));
    ++done;
  }
  return worst;
}

DecayReport check_feasibility_decay(const WitnessedProblem& wp, double beta, const std::vector<int>& ns,
                                    int seeds, std::uint64_t master_seed) {
  if (!wp.projection) throw InvalidInput("decay check needs an exact projection oracle");
  if (seeds < 1 || ns.size() < 2) throw InvalidInput("decay check needs seeds >= 1 and two sample counts");
  DecayReport rep;
  for (int n : ns) {
    double total = 0.0;
    for (int s = 0; s < seeds; ++s) {
      SeededStream base(master_seed, static_cast<std::uint64_t>(s));
      SeededStream start_rng = base.split(0);
      SeededStream pass_rng = base.split(1000 + static_cast<std::uint64_t>(n));
      const RealVec v = sample_uniform_box(wp.spec.base_set, start_rng);
      const FeasibilityPass pass = random_feasibility_pass(v, n, wp.spec.family, beta, wp.spec.base_set, pass_rng);
      total += (pass.x - wp.projection(pass.x)).norm();
    }
    rep.ns.push_back(static_cast<double>(n));
    rep.mean_dist.push_back(std::max(total / seeds, kDistFloor));
  }
  std::vector<double> logs;
  for (double d : rep.mean_dist) logs.push_back(std::log(d));
  rep.fit = fit_line(rep.ns, logs);
  return rep;
}

double check_pass_vs_dykstra(int instances, int n_steps, double beta, std::uint64_t master_seed) {
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    SeededStream rng(master_seed, static_cast<std::uint64_t>(i));
    const WitnessedProblem wp = random_box_halfspace_problem(rng);
    const RealVec v = sample_uniform_box(wp.spec.base_set, rng);
    std::vector<Halfspace> hs;
    for (const auto& con : wp.spec.family.members()) hs.push_back({con.c, con.d});
    const RealVec ref = dykstra_projection(v, wp.spec.base_set, hs, 5000);
    SeededStream pass_rng = rng.split(1);
    const FeasibilityPass pass = random_feasibility_pass(v, n_steps, wp.spec.family, beta, wp.spec.base_set, pass_rng);
    worst = std::max(worst, (pass.x - ref).norm());
  }
  return worst;
}

std::vector<SequenceBoundsRow> sequence_bounds_table(double alpha_bar, const std::vector<long long>& horizons) {
  if (!(alpha_bar > 0.0)) throw InvalidInput("alpha_bar must be positive");
  const double inv_const = std::sqrt(1.5) - 2.0 / 3.0;
  std::vector<SequenceBoundsRow> rows;
  for (long long t : horizons) {
    if (t < 1) throw InvalidInput("horizon must be >= 1");
    SequenceBoundsRow row{alpha_bar, t, 0, 0, 0, 0, 0, 0, true};
    for (long long k = 1; k <= t; ++k) {
      const double a = alpha_bar / std::sqrt(static_cast<double>(k + 1));
      row.sum_alpha += a;
      row.sum_alpha_sq += a * a;
      row.sum_inv_alpha += 1.0 / a;
    }
    const double td = static_cast<double>(t);
    row.sum_alpha_bound = alpha_bar * std::sqrt(td) / std::sqrt(2.0);
    row.sum_alpha_sq_bound = alpha_bar * alpha_bar * std::log(td + 2.0);
    row.sum_inv_alpha_bound = inv_const * std::pow(td, 1.5) / alpha_bar;
    row.holds = row.sum_alpha >= row.sum_alpha_bound && row.sum_alpha_sq <= row.sum_alpha_sq_bound &&
                (t < 2 || row.sum_inv_alpha >= row.sum_inv_alpha_bound);
    rows.push_back(row);
  }
  return rows;
}

bool check_sequence_bounds(double alpha_bar, const std::vector<long long>& horizons) {
  const auto rows = sequence_bounds_table(alpha_bar, horizons);
  return std::all_of(rows.begin(), rows.end(), [](const SequenceBoundsRow& r) { return r.holds; });
}

std::vector<CheckResult> run_verification_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;

  {
    bool ok = true;
    for (double ab : {0.1, 1.0, 10.0}) ok = ok && check_sequence_bounds(ab, {1, 2, 10, 100, 10000});
    out.push_back({"sequence_bounds", ok, ok ? 1.0 : 0.0, 1.0, "alpha_bar in {0.1,1,10}, T in {1,2,10,100,1e4}"});
  }
  {
    SeededStream rng(seed, 1);
    const double w = check_polyak_inequality(10000, rng);
    out.push_back({"polyak_step_inequality", w <= 1e-12, w, 1e-12, "10000 random cases, relative"});
  }
  {
    const double w = pass_inequality_sweep(10, 500, seed + 2);
    out.push_back({"feasibility_pass_inequality", w <= 1e-10, w, 1e-10, "10 game runs, T=500, relative"});
  }
  {
    const WitnessedProblem wp =
        make_box_halfspace_problem(BoxSet::cube(2, -1.0, 1.0), {Halfspace{RealVec{{1.0, 1.0}} / std::sqrt(2.0), -0.3}});
    std::vector<int> ns;
    for (int n = 1; n <= 30; ++n) ns.push_back(n);
    const DecayReport rep = check_feasibility_decay(wp, 0.5, ns, 200, seed + 3);
    const bool ok = rep.fit.slope < 0.0 && rep.fit.r2 >= 0.9;
    out.push_back({"feasibility_decay", ok, rep.fit.slope, 0.0,
                   "beta=0.5, N=1..30, 200 seeds, R2=" + std::to_string(rep.fit.r2)});
  }
  {
    const double w = check_pass_vs_dykstra(20, 500, 1.0, seed + 4);
    out.push_back({"pass_vs_dykstra", w <= 1e-3, w, 1e-3, "20 instances, beta=1, N=500"});
  }
  {
    SeededStream rng(seed, 5);
    double worst = 0.0;
    int done = 0;
    while (done < 100) {
      QuadraticConstraint con;
      con.B = random_sym_with_spectrum(RealVec{{rng.uniform(0, 2), rng.uniform(0, 2)}}, rng);
      con.c = gaussian_vector(2, 1.0, rng);
      con.d = -1.0;
      const RealVec x = gaussian_vector(2, 1.0, rng);
      if (constraint_value(con, x) <= 1e-3) continue;
      worst = std::max(worst, finite_diff_subgrad_check(con, x, 1e-5));
      ++done;
    }
    out.push_back({"subgradient_finite_difference", worst <= 1e-6, worst, 1e-6, "100 quadratics, h=1e-5"});
  }
  {
    SeededStream rng(seed, 6);
    double worst_excess = -1.0;
    for (int i = 0; i < 10; ++i) {
      const WitnessedProblem wp = random_box_halfspace_problem(rng);
      const RealVec x = sample_uniform_box(BoxSet::cube(2, -1.5, 1.5), rng);
      const double pitch = 0.01;
      const double d_grid = (brute_force_projection_grid(x, wp, pitch) - x).norm();
      const double d_exact = (wp.projection(x) - x).norm();
      // exact <= grid <= exact + cell diagonal
      worst_excess = std::max({worst_excess, d_exact - d_grid - 1e-12, d_grid - d_exact - pitch * std::sqrt(2.0)});
    }
    out.push_back({"grid_vs_exact_projection", worst_excess <= 0.0, worst_excess, 0.0,
                   "pitch 0.01, distance gap outside [0, pitch*sqrt(2)]"});
  }
  {
    SeededStream rng(seed, 7);
    SeededStream game_rng = rng.split(0);
    const ProblemSpec spec = make_zero_sum_game(2, 1000, game_rng);
    RealMat pts(4, 512);
    for (Eigen::Index j = 0; j < pts.cols(); ++j) pts.col(j) = sample_uniform_box(spec.base_set, rng);
    const bool same_mask = kernels::serial::feasible_mask(spec.family.members(), pts) ==
                           kernels::omp::feasible_mask(spec.family.members(), pts);
    const RealMat fs = kernels::serial::map_columns(spec.oracle.mean_map, pts);
    const RealMat fo = kernels::omp::map_columns(spec.oracle.mean_map, pts);
    RealVec offs = RealVec::Zero(pts.cols());
    const RealVec y = sample_uniform_box(spec.base_set, rng);
    const bool same_max = kernels::serial::max_affine(fs, offs, y) == kernels::omp::max_affine(fo, offs, y);
    const bool ok = same_mask && fs == fo && same_max;
    out.push_back({"kernel_parity", ok, ok ? 0.0 : 1.0, 0.0, "serial vs OpenMP kernels, bitwise"});
  }
  return out;
}

std::string report_json(const std::vector<CheckResult>& results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    arr.push_back({{"name", r.name},
                   {"status", r.passed ? "pass" : "fail"},
                   {"measured", r.measured},
                   {"threshold", r.threshold},
                   {"detail", r.detail}});
  }
  return arr.dump(2);
}

}  // namespace rfvi::verify
