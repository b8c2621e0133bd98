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

#include <vector>

#include "qlmp/grid.hpp"
#include "qlmp/model.hpp"
#include "qlmp/transform.hpp"

namespace qlmp {

struct EnergyBreakdown {
  double kinetic = 0.0;    // 1/2 int |grad v|^2
  double potential = 0.0;  // 1/2 int V f(v)^2
  double nonlinear = 0.0;  // int G(x, f(v))
  double total = 0.0;
};

/// The discrete transformed functional on one grid, with V and the
/// quadrature weights cached. Evaluations are pure; an instance can be
/// shared read-only.
///
/// Every evaluation checks growth_rate * f(v)^4 against the kernel's
/// exp_guard node by node and throws EvaluationError at the first offender.
class DiscreteFunctional {
 public:
  DiscreteFunctional(ModelProblem model, GridPtr grid, TransformKernel kernel = {});

  [[nodiscard]] const ModelProblem& model() const noexcept { return model_; }
  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
  [[nodiscard]] const TransformKernel& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const std::vector<double>& potential_values() const noexcept { return V_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

  [[nodiscard]] EnergyBreakdown j_bar(const Field& v) const;

  /// Untransformed energy of u. The kinetic term is discretised edgewise as
  /// (h(u_i) - h(u_j))^2, a consistent approximation of (1+u^2)|grad u|^2
  /// that makes J(f(v)) and J_bar(v) agree to round-off.
  [[nodiscard]] double j(const Field& u) const;

  /// Cell-measure scaled residual K v + W (V f f' - g(f) f'); the exact
  /// gradient of j_bar with respect to the nodal values.
  [[nodiscard]] Field gradient(const Field& v) const;

  /// int |grad v|^2 + int V f(v)^2.
  [[nodiscard]] double constraint_norm_sq(const Field& v) const;

  [[nodiscard]] double orlicz_norm(const Field& v) const;
  [[nodiscard]] double h1l_norm(const Field& v) const;

  /// Standard H^1 norm of f(v)^2.
  [[nodiscard]] double square_h1_norm(const Field& v) const;

  /// <J_bar'(v), f(v)/f'(v)> with its three contributions.
  struct TestDirectionPairing {
    double kinetic = 0.0;
    double potential = 0.0;
    double nonlinear = 0.0;
    double total = 0.0;
  };
  [[nodiscard]] TestDirectionPairing pairing_with_f_over_fprime(const Field& v) const;

 private:
  void guard(double u, std::size_t node) const;
  [[nodiscard]] bool on_grid(const Field& v) const;

  ModelProblem model_;
  GridPtr grid_;
  TransformKernel kernel_;
  std::vector<double> V_;
  std::vector<double> weights_;
  std::vector<Point> positions_;
  double guard_amplitude_;
};

[[nodiscard]] EnergyBreakdown evaluate_J_bar(const ModelProblem& model, const Field& v);
[[nodiscard]] double evaluate_J(const ModelProblem& model, const Field& u);
[[nodiscard]] Field gradient_J_bar(const ModelProblem& model, const Field& v);
[[nodiscard]] double orlicz_norm(const ModelProblem& model, const Field& v);
[[nodiscard]] double h1L_norm(const ModelProblem& model, const Field& v);

/// Naive nodal discretisation of 1/2 int (1+u^2)|grad u|^2 using edge
/// midpoint values; only used to measure the continuum kinetic identity.
[[nodiscard]] double naive_quasilinear_kinetic(const Field& u);

/// Scales direction w to s*w with constraint_norm_sq(s*w) = rho^2 (s > 0).
[[nodiscard]] Field scale_to_constraint(const DiscreteFunctional& functional, const Field& w, double rho);

}  // namespace qlmp
