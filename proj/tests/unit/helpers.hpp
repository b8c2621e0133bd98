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

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "qlmp/grid.hpp"
#include "qlmp/model.hpp"
#include "qlmp/solver.hpp"

namespace qlmp::testing {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Sum of a few Gaussian bumps plus optional nodal noise; zero-mean signs
/// when `signed_amplitudes`.
inline Field random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, double amplitude,
                                 bool signed_amplitudes = true, double noise = 0.0) {
  double extent = 2.0;
  if (const auto* g = std::get_if<Grid2D>(grid.get())) extent = 0.4 * g->half_width();
  const bool radial = std::holds_alternative<RadialGrid>(*grid);
  const int bumps = 1 + static_cast<int>(uniform01(rng) * 4.0);
  std::vector<double> a, c1, c2, s;
  for (int b = 0; b < bumps; ++b) {
    const double mag = uniform(rng, 0.2, 1.0) * amplitude;
    a.push_back(signed_amplitudes && uniform01(rng) < 0.4 ? -mag : mag);
    c1.push_back(radial ? 0.0 : uniform(rng, -extent, extent));
    c2.push_back(radial ? 0.0 : uniform(rng, -extent, extent));
    s.push_back(uniform(rng, 0.6, 1.8));
  }
  Field f = Field::sample(grid, [&](Point x) {
    double acc = 0.0;
    for (std::size_t b = 0; b < a.size(); ++b) {
      const double dx = x.x1 - c1[b];
      const double dy = x.x2 - c2[b];
      acc += a[b] * std::exp(-(dx * dx + dy * dy) / (s[b] * s[b]));
    }
    return acc;
  });
  if (noise > 0.0) {
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += noise * amplitude * uniform(rng, -1.0, 1.0);
  }
  return f;
}

/// S_p of the builtin potential on the default radial grid (computed once).
inline double builtin_sp() {
  static const double value = compute_sp(builtin_model("power")).value;
  return value;
}

/// Builtin with Cp at 1.5 times the admissibility threshold.
inline ModelProblem calibrated(std::string_view name) { return calibrate_cp(name, builtin_sp()); }

}  // namespace qlmp::testing
