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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qlmp {

/// A position in the plane.
struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Concrete instance of the elliptic problem: potential V, nonlinearity g,
/// its primitive G and the structural constants the hypotheses refer to.
///
/// g is supplied for s >= 0 and extended oddly to s < 0 (G evenly), so the
/// discrete functionals stay defined on sign-changing test fields.
/// The closures capture Cp at construction; rebuild through builtin_model()
/// to change it.
struct ModelProblem {
  std::string name;
  double V0 = 1.0;
  double V1 = 1.0;
  double theta = 6.0;
  double p = 6.0;
  double Cp = 1.0;
  double v_amplitude = 0.5;
  /// beta of the exp(beta s^4) factor in g; 0 for polynomial nonlinearities.
  double growth_rate = 0.0;
  bool constant_potential = false;

  std::function<double(Point)> potential;
  std::function<double(Point, double)> nonlinearity;
  std::function<double(Point, double)> primitive;

  /// Largest |s| for which growth_rate * s^4 stays at or below exp_guard.
  [[nodiscard]] double safe_amplitude(double exp_guard) const;
};

struct ModelOverrides {
  std::optional<double> theta;
  std::optional<double> p;
  std::optional<double> Cp;
  std::optional<double> v_amplitude;
};

/// Names accepted by builtin_model().
[[nodiscard]] std::span<const std::string_view> builtin_model_names();

/// "power", "critical" or "constant_V_power"; throws LookupError otherwise.
[[nodiscard]] ModelProblem builtin_model(std::string_view name, const ModelOverrides& overrides = {});

/// Right-hand side of the admissibility condition on Cp:
/// [theta (p-2) / (p (theta-4))]^((p-2)/2) * sp^p.
[[nodiscard]] double cp_threshold(double theta, double p, double sp_value);

enum class HypothesisStatus { pass, fail, skipped };

[[nodiscard]] std::string_view to_string(HypothesisStatus status);

struct HypothesisResult {
  std::string id;
  HypothesisStatus status = HypothesisStatus::pass;
  /// Largest signed violation; <= 0 means the sampled condition holds.
  double worst_violation = 0.0;
  Point worst_x;
  double worst_s = 0.0;
  std::size_t untestable_samples = 0;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisResult> entries;  // H1..H6 in order

  [[nodiscard]] const HypothesisResult& at(std::string_view id) const;
  [[nodiscard]] bool passes_h1_to_h5() const;
};

struct HypothesisOptions {
  double exp_guard = 700.0;
  double h2_envelope = 0.01;
  double h2_s_max = 1e-3;
  double primitive_rel_tol = 1e-6;
  double periodicity_tol = 1e-12;
  double growth_slope_tol = 0.05;
};

/// Audits H1-H6 on the given samples. Violations are reported, never thrown.
/// s_samples must be positive and sorted ascending.
[[nodiscard]] HypothesisReport check_hypotheses(const ModelProblem& model,
                                                std::span<const double> s_samples,
                                                std::span<const Point> x_samples,
                                                std::optional<double> sp_value = std::nullopt,
                                                const HypothesisOptions& options = {});

/// Log-spaced s samples from 1e-6 up to the exponent-safe bound (capped at 5).
[[nodiscard]] std::vector<double> default_s_samples(const ModelProblem& model,
                                                    double exp_guard = 700.0,
                                                    std::size_t count = 400);

/// A lattice over the unit cell plus a few off-lattice points.
[[nodiscard]] std::vector<Point> default_x_samples(std::size_t per_axis = 8);

}  // namespace qlmp
