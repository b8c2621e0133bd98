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

#include <string_view>
#include <vector>

#include "qlmp/grid.hpp"
#include "qlmp/model.hpp"
#include "qlmp/transform.hpp"

namespace qlmp {

enum class ShootClass { crosses_zero, stays_positive_diverges, converged_to_zero };

[[nodiscard]] std::string_view to_string(ShootClass c);

struct TrajectoryPoint {
  double r = 0.0;
  double v = 0.0;
  double dv = 0.0;
};

struct ShootResult {
  double v0 = 0.0;
  std::vector<TrajectoryPoint> trajectory;
  ShootClass classification = ShootClass::converged_to_zero;
};

/// RK4 on v'' = -v'/r + V f(v) f'(v) - g(f(v)) f'(v) from the axis to r_max.
/// Stops early once the class is decided.
[[nodiscard]] ShootResult shoot(const ModelProblem& model, double r_max, double v0, double step,
                                const TransformKernel& kernel = {});

struct ShootingOptions {
  double r_max = 6.0;
  double step = 1e-3;
  double tol_v0 = 1e-13;
  double sweep_min = 1e-4;
  double sweep_max = 1e2;
  int sweep_points = 61;
  /// Nodes of the radial grid the profile is resampled onto.
  int m = 600;
};

struct ShootingSolution {
  double v0 = 0.0;
  Field profile;  // on RadialGrid(r_max, m)
  ShootResult trajectory;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  std::vector<double> bisection_widths;
};

/// Bisects v0 between trajectories that cross zero before r_max and those
/// that do not; the limit has v(r_max) = 0, the Dirichlet problem on the disc.
[[nodiscard]] ShootingSolution find_ground_state_shooting(const ModelProblem& model,
                                                          const ShootingOptions& options = {});

/// Linear interpolation of a trajectory at radius r (0 beyond its end).
[[nodiscard]] double interpolate_trajectory(const std::vector<TrajectoryPoint>& trajectory, double r);

/// Angular mean of a 2D field (bilinear, zero outside the box) at each node of `target`.
[[nodiscard]] Field radial_average(const Field& field, const GridPtr& target, int angles = 64);

/// sqrt(int (a-b)^2 dA / int b^2 dA) on b's radial grid; a is averaged or
/// interpolated onto it first.
[[nodiscard]] double compare_profiles(const Field& a, const Field& b);

}  // namespace qlmp
