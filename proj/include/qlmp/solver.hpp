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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qlmp/energy.hpp"
#include "qlmp/error.hpp"
#include "qlmp/grid.hpp"
#include "qlmp/model.hpp"

namespace qlmp {

struct SolverOptions {
  int path_nodes = 21;
  double tol = 1e-5;
  int max_sweeps = 50'000;
  std::uint64_t seed = 20260101;
  std::vector<double> rho_scan{1e-3, 1e-2, 1e-1};

  double armijo_initial = 1.0;
  double armijo_shrink = 0.5;
  double armijo_slope = 1e-4;
  double min_step = 1e-14;
  /// Shift alpha of the (K + alpha W) preconditioner.
  double precond_shift = 1.0;
  /// Stopping level for the endpoint doubling search.
  double endpoint_level = -1e-3;
  /// Width of the initial mountain profile exp(-|x|^2 / width^2).
  double profile_width = 1.0;
  /// Relative slack on the non-increase of the path maximum.
  double monotone_slack = 1e-12;
};

/// The discretised path: nodes[0] = 0, energies.back() <= 0.
struct PathState {
  std::vector<Field> nodes;
  std::vector<double> energies;
  std::size_t max_index = 0;
};

struct BoundCheck {
  bool passed = false;
  /// Signed distance to the bound; >= 0 when passed.
  double margin = 0.0;
  std::string detail;
  /// Informational checks are reported but do not decide the exit status.
  bool gating = true;
};

using BoundChecks = std::map<std::string, BoundCheck>;

struct HistoryEntry {
  int iteration = 0;
  double energy = 0.0;
  double residual = 0.0;
};

struct SolveReport {
  Field solution;
  double energy = 0.0;
  double residual_max = 0.0;
  double residual_l2 = 0.0;
  int iterations = 0;
  BoundChecks bound_checks;
  std::vector<HistoryEntry> history;
  EnergyBreakdown breakdown;
  double min_value = 0.0;
  double h1l_norm = 0.0;
};

/// The sweep cap was reached; carries the best iterate.
class NonConvergenceError : public ConvergenceError {
 public:
  NonConvergenceError(const std::string& what, SolveReport best)
      : ConvergenceError(what), best_(std::move(best)) {}
  [[nodiscard]] const SolveReport& best() const noexcept { return best_; }

 private:
  SolveReport best_;
};

/// The line search collapsed or the path maximum increased.
class StepSizeError : public ConvergenceError {
 public:
  StepSizeError(const std::string& what, SolveReport best) : ConvergenceError(what), best_(std::move(best)) {}
  [[nodiscard]] const SolveReport& best() const noexcept { return best_; }

 private:
  SolveReport best_;
};

/// h(t phi) for the first t in 1, 2, 4, ... with J_bar <= level.
[[nodiscard]] Field find_descent_endpoint(const DiscreteFunctional& functional, const Field& phi,
                                          double level = -1e-3);
[[nodiscard]] Field find_descent_endpoint(const ModelProblem& model, const Field& phi, double level = -1e-3);

/// Maximiser s* > 0 of s -> J_bar(s w), returned as s* w.
[[nodiscard]] Field ray_peak(const DiscreteFunctional& functional, const Field& w);

/// Path of P nodes along the ray through `peak`, ending at a negative-energy point.
[[nodiscard]] PathState build_ray_path(const DiscreteFunctional& functional, const Field& peak, int path_nodes,
                                       double endpoint_level);

using SweepObserver = std::function<void(const PathState&, const HistoryEntry&)>;

[[nodiscard]] SolveReport mountain_pass_solve(const ModelProblem& model, const GridPtr& grid,
                                              const SolverOptions& options = {},
                                              const SweepObserver& observer = {});

struct SpResult {
  double value = 0.0;
  Field minimizer;
  double restarts_spread = 0.0;
  std::vector<double> restart_values;
};

struct SpOptions {
  int restarts = 4;
  int max_iterations = 20'000;
  double rel_tol = 1e-13;
  std::uint64_t seed = 20260101;
};

/// Discrete S_p quotient of a radial field with the model's constant V1.
/// The mixed term is int u^2 |grad u|^2 = (1/4) int |grad u^2|^2.
[[nodiscard]] double sp_quotient(const ModelProblem& model, const Field& u);

[[nodiscard]] SpResult compute_sp(const ModelProblem& model, const GridPtr& grid, const SpOptions& options = {});
[[nodiscard]] SpResult compute_sp(const ModelProblem& model, const SpOptions& options = {});

/// Default radial grid for compute_sp.
[[nodiscard]] GridPtr default_sp_grid();

/// Rebuilds the builtin with Cp = factor * cp_threshold(theta, p, sp).
[[nodiscard]] ModelProblem calibrate_cp(std::string_view name, double sp_value, double factor = 1.5,
                                        ModelOverrides overrides = {});

struct VerifyOptions {
  std::vector<double> rho_scan{1e-3, 1e-2, 1e-1};
  std::uint64_t seed = 20260101;
  double positivity_floor = -1e-8;
  double nontrivial_norm = 0.01;
  double norm_bound_slack = 1e-3;
  double identity_rel_tol = 1e-3;
  int ensemble_fit = 12;
  int ensemble_holdout = 8;
  double ensemble_safety = 2.0;
};

/// Named checks against the level bounds, geometry and identities.
[[nodiscard]] BoundChecks verify_solution(const ModelProblem& model, const SolveReport& report,
                                          const VerifyOptions& options = {});

}  // namespace qlmp
