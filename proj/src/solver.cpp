// Copyright 2026 The qlmp Authors
//
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

#include "qlmp/solver.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace qlmp {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::string format_real(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

double ray_slope(const DiscreteFunctional& F, const Field& w, double s) { return dot(F.gradient(s * w), w); }

Field gaussian_profile(const GridPtr& grid, double width) {
  return Field::sample(grid, [width](Point x) { return std::exp(-(x.x1 * x.x1 + x.x2 * x.x2) / (width * width)); });
}

SolveReport make_report(const DiscreteFunctional& F, const Field& v, const std::vector<HistoryEntry>& history) {
  SolveReport r;
  r.solution = v;
  const Field g = F.gradient(v);
  r.breakdown = F.j_bar(v);
  r.energy = r.breakdown.total;
  r.residual_max = max_abs(g);
  r.residual_l2 = std::sqrt(dot(g, g));
  r.history = history;
  r.iterations = history.empty() ? 0 : history.back().iteration;
  r.min_value = *std::min_element(v.values().begin(), v.values().end());
  r.h1l_norm = F.h1l_norm(v);
  return r;
}

}  // namespace

Field find_descent_endpoint(const DiscreteFunctional& F, const Field& phi, double level) {
  if (max_abs(phi) == 0.0) throw DomainError("find_descent_endpoint: phi is identically zero");
  const auto& kernel = F.kernel();
  for (double t = 1.0; t <= 0x1.0p20; t *= 2.0) {
    Field e(phi.grid_ptr());
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = kernel.h_forward(t * phi[k]);
    if (F.j_bar(e).total <= level) return e;
  }
  throw DomainError("find_descent_endpoint: energy did not turn negative up to t = 2^20");
}

Field find_descent_endpoint(const ModelProblem& model, const Field& phi, double level) {
  return find_descent_endpoint(DiscreteFunctional(model, phi.grid_ptr()), phi, level);
}

Field ray_peak(const DiscreteFunctional& F, const Field& w) {
  constexpr double kGrow = 1.5;
  constexpr int kMaxBracket = 200;
  const auto slope = [&](double s) { return ray_slope(F, w, s); };
  double lo = 1.0;
  double hi = 1.0;
  const double d1 = slope(1.0);
  if (d1 == 0.0) return w;
  if (d1 > 0.0) {
    hi = kGrow;
    for (int i = 0; slope(hi) > 0.0; ++i) {
      if (i > kMaxBracket) throw ConvergenceError("ray_peak: energy keeps rising along the ray");
      lo = hi;
      hi *= kGrow;
    }
  } else {
    lo = 1.0 / kGrow;
    for (int i = 0; slope(lo) < 0.0; ++i) {
      if (i > kMaxBracket) throw ConvergenceError("ray_peak: no ascent near the origin");
      hi = lo;
      lo /= kGrow;
    }
  }
  std::uintmax_t max_iter = 100;
  const auto [a, b] =
      boost::math::tools::toms748_solve(slope, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return (0.5 * (a + b)) * w;
}

PathState build_ray_path(const DiscreteFunctional& F, const Field& peak, int path_nodes, double endpoint_level) {
  if (path_nodes < 3) throw DomainError("build_ray_path: need at least 3 nodes");
  double t_end = 2.0;
  while (F.j_bar(t_end * peak).total > endpoint_level) {
    t_end *= 2.0;
    if (t_end > 0x1.0p20) throw DomainError("build_ray_path: no negative endpoint along the ray");
  }
  const int last = path_nodes - 1;
  const int k = last / 2;
  PathState path;
  path.nodes.reserve(static_cast<std::size_t>(path_nodes));
  for (int i = 0; i < path_nodes; ++i) {
    const double s = i <= k ? static_cast<double>(i) / k : 1.0 + (t_end - 1.0) * (i - k) / (last - k);
    path.nodes.push_back(s * peak);
  }
  path.energies.reserve(path.nodes.size());
  for (const auto& node : path.nodes) path.energies.push_back(F.j_bar(node).total);
  path.max_index = static_cast<std::size_t>(
      std::distance(path.energies.begin(), std::max_element(path.energies.begin(), path.energies.end())));
  return path;
}

SolveReport mountain_pass_solve(const ModelProblem& model, const GridPtr& grid, const SolverOptions& opt,
                                const SweepObserver& observer) {
  if (opt.path_nodes < 3) throw ValidationError("solver.P must be at least 3");
  if (!(opt.tol > 0.0)) throw ValidationError("solver.tol must be positive");
  if (opt.max_sweeps < 1) throw ValidationError("solver.max_sweeps must be positive");

  const DiscreteFunctional F(model, grid);
  const ShiftedStiffnessSolver precond(grid, opt.precond_shift);

  const Field phi = gaussian_profile(grid, opt.profile_width);
  const Field endpoint = find_descent_endpoint(F, phi, opt.endpoint_level);
  Field v = ray_peak(F, endpoint);
  double E = F.j_bar(v).total;

  std::vector<HistoryEntry> history;
  VerifyOptions vopt;
  vopt.rho_scan = opt.rho_scan;
  vopt.seed = opt.seed;

  for (int sweep = 0;; ++sweep) {
    const PathState path = build_ray_path(F, v, opt.path_nodes, opt.endpoint_level);
    const Field g = F.gradient(v);
    const HistoryEntry entry{sweep, E, max_abs(g)};
    history.push_back(entry);
    if (observer) observer(path, entry);

    if (entry.residual <= opt.tol) {
      SolveReport report = make_report(F, v, history);
      if (!(report.h1l_norm > vopt.nontrivial_norm)) {
        throw ConvergenceError("mountain_pass_solve: converged to the trivial solution");
      }
      report.bound_checks = verify_solution(model, report, vopt);
      return report;
    }
    if (sweep >= opt.max_sweeps) {
      throw NonConvergenceError("mountain_pass_solve: sweep cap reached", make_report(F, v, history));
    }

    Field d = precond.solve(g);
    d *= -1.0;
    const double slope = dot(g, d);
    double step = opt.armijo_initial;
    for (;;) {
      if (step < opt.min_step) {
        throw StepSizeError("mountain_pass_solve: line search step collapsed", make_report(F, v, history));
      }
      try {
        Field candidate = ray_peak(F, v + step * d);
        const double Ec = F.j_bar(candidate).total;
        if (Ec <= E + opt.armijo_slope * step * slope) {
          if (Ec > E + opt.monotone_slack * std::abs(E)) {
            throw StepSizeError("mountain_pass_solve: path maximum increased", make_report(F, v, history));
          }
          v = std::move(candidate);
          E = Ec;
          break;
        }
      } catch (const EvaluationError&) {
      } catch (const StepSizeError&) {
        throw;
      } catch (const ConvergenceError&) {
      }
      step *= opt.armijo_shrink;
    }
  }
}

// ---------------------------------------------------------------------------
// S_p

namespace {

struct QuotientParts {
  double A = 0.0;  // int |grad u|^2 + V1 u^2
  double B = 0.0;  // int u^2 |grad u|^2
  double C = 0.0;  // int |u|^p
  [[nodiscard]] double numerator() const { return A + std::sqrt(B); }
  [[nodiscard]] double log_q(double p) const { return 0.5 * std::log(numerator()) - std::log(C) / p; }
};

Field squared(const Field& u) {
  Field q(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) q[k] = u[k] * u[k];
  return q;
}

QuotientParts quotient_parts(const ModelProblem& model, const std::vector<double>& w, const Field& u) {
  QuotientParts q;
  double mass = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    mass += w[k] * u[k] * u[k];
    q.C += w[k] * std::pow(std::abs(u[k]), model.p);
  }
  q.A = dirichlet_energy(u) + model.V1 * mass;
  q.B = 0.25 * dirichlet_energy(squared(u));
  return q;
}

Field log_q_gradient(const ModelProblem& model, const std::vector<double>& w, const Field& u,
                     const QuotientParts& q) {
  const Field Ku = stiffness_apply(u);
  const Field Kq = stiffness_apply(squared(u));
  const double N = q.numerator();
  const double sqrtB = std::sqrt(q.B);
  Field g(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double dA = 2.0 * Ku[k] + 2.0 * model.V1 * w[k] * u[k];
    const double dsqrtB = sqrtB > 0.0 ? Kq[k] * u[k] / (2.0 * sqrtB) : 0.0;
    const double dC = model.p * w[k] * std::pow(std::abs(u[k]), model.p - 1.0) * (u[k] < 0.0 ? -1.0 : 1.0);
    g[k] = 0.5 * (dA + dsqrtB) / N - dC / (model.p * q.C);
  }
  return g;
}

void normalize(const ModelProblem& model, const std::vector<double>& w, Field& u) {
  double C = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) C += w[k] * std::pow(std::abs(u[k]), model.p);
  u *= std::pow(C, -1.0 / model.p);
}

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  Field u;
  bool descended = false;
};

RestartOutcome descend_quotient(const ModelProblem& model, const GridPtr& grid, Field u, const SpOptions& opt) {
  const auto w = quadrature_weights(*grid);
  const ShiftedStiffnessSolver precond(grid, model.V1);
  normalize(model, w, u);
  QuotientParts q = quotient_parts(model, w, u);
  double f = q.log_q(model.p);
  const double f_start = f;
  double step = 1.0;
  int quiet = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Field g = log_q_gradient(model, w, u, q);
    Field d = precond.solve(g);
    d *= -q.numerator();
    const double slope = dot(g, d);
    if (!(slope < 0.0)) break;
    step = std::min(1.0, 2.0 * step);
    bool accepted = false;
    while (step > 1e-16) {
      Field trial = u + step * d;
      normalize(model, w, trial);
      const QuotientParts qt = quotient_parts(model, w, trial);
      const double ft = qt.log_q(model.p);
      if (std::isfinite(ft) && ft <= f + 1e-4 * step * slope) {
        const double drop = f - ft;
        u = std::move(trial);
        q = qt;
        f = ft;
        accepted = true;
        quiet = drop <= opt.rel_tol ? quiet + 1 : 0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || quiet >= 5) break;
  }
  RestartOutcome out;
  out.value = std::exp(f);
  out.descended = f < f_start || std::abs(f - f_start) <= opt.rel_tol;
  out.u = std::move(u);
  return out;
}

}  // namespace

double sp_quotient(const ModelProblem& model, const Field& u) {
  if (max_abs(u) == 0.0) throw DomainError("sp_quotient: zero field is excluded");
  const auto w = quadrature_weights(u.grid());
  const QuotientParts q = quotient_parts(model, w, u);
  return std::sqrt(q.numerator()) / std::pow(q.C, 1.0 / model.p);
}

GridPtr default_sp_grid() { return make_grid(RadialGrid(8.0, 800)); }

SpResult compute_sp(const ModelProblem& model, const GridPtr& grid, const SpOptions& opt) {
  if (opt.restarts < 1) throw ValidationError("sp restarts must be at least 1");
  if (!std::holds_alternative<RadialGrid>(*grid)) throw DomainError("compute_sp: needs a radial grid");
  std::mt19937_64 rng(opt.seed);
  std::vector<RestartOutcome> outcomes;
  for (int r = 0; r < opt.restarts; ++r) {
    const double width = uniform(rng, 0.4, 1.6);
    const double shape = uniform(rng, 1.5, 3.0);
    const double bump = uniform(rng, 0.0, 0.5);
    Field u0 = Field::sample(grid, [=](Point x) {
      const double r = std::abs(x.x1);
      return std::exp(-std::pow(r / width, shape)) + bump * std::exp(-r * r);
    });
    try {
      RestartOutcome o = descend_quotient(model, grid, std::move(u0), opt);
      if (o.descended && std::isfinite(o.value)) outcomes.push_back(std::move(o));
    } catch (const Error&) {
    }
  }
  if (outcomes.empty()) throw ConvergenceError("compute_sp: every restart failed to descend");
  // Merge by (value, restart order) so ties resolve to the earliest restart.
  std::size_t best = 0;
  double lo = outcomes[0].value;
  double hi = outcomes[0].value;
  SpResult result;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    result.restart_values.push_back(outcomes[i].value);
    if (outcomes[i].value < outcomes[best].value) best = i;
    lo = std::min(lo, outcomes[i].value);
    hi = std::max(hi, outcomes[i].value);
  }
  result.value = outcomes[best].value;
  result.minimizer = std::move(outcomes[best].u);
  result.restarts_spread = (hi - lo) / lo;
  return result;
}

SpResult compute_sp(const ModelProblem& model, const SpOptions& opt) {
  return compute_sp(model, default_sp_grid(), opt);
}

ModelProblem calibrate_cp(std::string_view name, double sp_value, double factor, ModelOverrides overrides) {
  if (!(factor > 0.0)) throw DomainError("calibrate_cp: factor must be positive");
  const ModelProblem base = builtin_model(name, overrides);
  overrides.Cp = factor * cp_threshold(base.theta, base.p, sp_value);
  return builtin_model(name, overrides);
}

// ---------------------------------------------------------------------------
// verification

BoundChecks verify_solution(const ModelProblem& model, const SolveReport& report, const VerifyOptions& opt) {
  BoundChecks out;
  const Field& v = report.solution;
  const DiscreteFunctional F(model, v.grid_ptr());
  const double E = report.energy;

  out["energy_positive"] = {E > 0.0, E, "J_bar(v*) > 0"};
  const double vmin = *std::min_element(v.values().begin(), v.values().end());
  out["nonnegative"] = {vmin >= opt.positivity_floor, vmin - opt.positivity_floor, "min v* >= -1e-8"};
  const double norm = F.h1l_norm(v);
  out["nontrivial"] = {norm > opt.nontrivial_norm, norm - opt.nontrivial_norm, "||v*|| > 0.01"};

  const double theta = model.theta;
  if (theta > 4.0) {
    const double upper = (theta - 4.0) / (2.0 * theta);
    out["level_upper_bound"] = {E < upper, upper - E, "J_bar(v*) < (theta-4)/(2 theta)"};
    const double K = F.constraint_norm_sq(v);
    const double cap = 2.0 * theta / (theta - 4.0) * E * (1.0 + opt.norm_bound_slack);
    out["critical_norm_bound"] = {K <= cap, cap - K, "int |grad v|^2 + V f(v)^2 <= 2 theta E / (theta-4)"};
  } else {
    out["level_upper_bound"] = {false, -1.0, "theta <= 4: bound undefined"};
    out["critical_norm_bound"] = {false, -1.0, "theta <= 4: bound undefined"};
  }

  // Geometry along the solution direction.
  if (norm > 0.0) {
    double largest = 0.0;
    bool smallest_ok = false;
    std::vector<double> scan = opt.rho_scan;
    std::sort(scan.begin(), scan.end());
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const double rho = scan[i];
      const Field vr = scale_to_constraint(F, v, rho);
      const double margin = F.j_bar(vr).total - rho * rho / 8.0;
      BoundCheck c{margin >= 0.0, margin, "J_bar >= rho^2/8 at rho = " + format_real("%.3g", rho)};
      c.gating = false;
      out["geometry_rho_" + format_real("%.0e", rho)] = c;
      if (margin >= 0.0) largest = std::max(largest, rho);
      if (i == 0) smallest_ok = margin >= 0.0;
    }
    BoundCheck g{smallest_ok, largest, "largest scanned rho where J_bar >= rho^2/8"};
    out["geometry"] = g;
  }

  // Criticality in the direction f/f'.
  const auto pr = F.pairing_with_f_over_fprime(v);
  const double scale = std::abs(pr.kinetic) + std::abs(pr.potential) + std::abs(pr.nonlinear);
  out["criticality_identity"] = {std::abs(pr.total) <= opt.identity_rel_tol * scale,
                                 opt.identity_rel_tol * scale - std::abs(pr.total),
                                 "<J_bar'(v*), f/f'> = 0 relative to its terms"};

  // ||f(v)^2||_{H^1} <= C (||v|| + ||v||^2) with C fitted on smooth bumps.
  {
    std::mt19937_64 rng(opt.seed ^ 0x5eed5eedULL);
    const GridPtr& grid = v.grid_ptr();
    double extent = 1.0;
    if (const auto* g2 = std::get_if<Grid2D>(grid.get())) extent = 0.5 * g2->half_width();
    if (const auto* gr = std::get_if<RadialGrid>(grid.get())) extent = 0.25 * gr->r_max();
    const bool radial = std::holds_alternative<RadialGrid>(*grid);
    const auto ratio = [&](const Field& f) {
      const double n = F.h1l_norm(f);
      return F.square_h1_norm(f) / (n + n * n);
    };
    double fit_max = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    std::vector<double> held;
    for (int i = 0; i < opt.ensemble_fit + opt.ensemble_holdout; ++i) {
      const int bumps = 1 + static_cast<int>(uniform01(rng) * 3.0);
      std::vector<double> a, c1, c2, s;
      for (int b = 0; b < bumps; ++b) {
        a.push_back(uniform(rng, 0.05, 1.0));
        c1.push_back(radial ? 0.0 : uniform(rng, -extent, extent));
        c2.push_back(radial ? 0.0 : uniform(rng, -extent, extent));
        s.push_back(uniform(rng, 0.5, 1.5));
      }
      const Field f = Field::sample(grid, [&](Point x) {
        double acc = 0.0;
        for (std::size_t b = 0; b < a.size(); ++b) {
          const double dx = x.x1 - c1[b];
          const double dy = x.x2 - c2[b];
          acc += a[b] * std::exp(-(dx * dx + dy * dy) / (s[b] * s[b]));
        }
        return acc;
      });
      const double r = ratio(f);
      if (i < opt.ensemble_fit) {
        fit_max = std::max(fit_max, r);
      } else {
        held.push_back(r);
      }
    }
    held.push_back(ratio(v));
    const double C = opt.ensemble_safety * fit_max;
    for (double r : held) worst = std::min(worst, C - r);
    out["square_norm_inequality"] = {worst >= 0.0, worst,
                                     "||f(v)^2||_H1 <= C(||v|| + ||v||^2), C = " + format_real("%.6g", C)};
  }
  return out;
}

}  // namespace qlmp
