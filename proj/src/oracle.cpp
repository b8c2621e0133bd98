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

#include "qlmp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qlmp/error.hpp"

namespace qlmp {

std::string_view to_string(ShootClass c) {
  switch (c) {
    case ShootClass::crosses_zero:
      return "crosses_zero";
    case ShootClass::stays_positive_diverges:
      return "stays_positive_diverges";
    case ShootClass::converged_to_zero:
      return "converged_to_zero";
  }
  return "unknown";
}

namespace {

constexpr double kCrossThreshold = -1e-10;
constexpr double kGrowthFactor = 10.0;

struct State {
  double v;
  double dv;
};

}  // namespace

ShootResult shoot(const ModelProblem& model, double r_max, double v0, double step, const TransformKernel& kernel) {
  if (!model.constant_potential) throw DomainError("shoot: needs a constant potential");
  if (!(v0 >= 0.0)) throw DomainError("shoot: v0 must be nonnegative");
  if (!(step > 0.0) || !(r_max > step)) throw DomainError("shoot: need 0 < step < r_max");

  const double V = model.V1;
  const Point origin{};
  const auto source = [&](double v) {
    const auto [u, slope] = kernel.f_with_slope(v);
    return (V * u - model.nonlinearity(origin, u)) * slope;
  };
  const auto rhs = [&](double r, State s) { return State{s.dv, -s.dv / r + source(s.v)}; };

  ShootResult out;
  out.v0 = v0;
  out.trajectory.push_back({0.0, v0, 0.0});
  if (v0 == 0.0) {
    // Equilibrium; record the flat trajectory at the end point as well.
    out.trajectory.push_back({r_max, 0.0, 0.0});
    out.classification = ShootClass::converged_to_zero;
    return out;
  }

  // v = v0 + a r^2/4 near the axis.
  const double a = source(v0);
  State s{v0 + 0.25 * a * step * step, 0.5 * a * step};
  double r = step;
  out.trajectory.push_back({r, s.v, s.dv});
  bool decreased = s.dv < 0.0;

  const auto n_steps = static_cast<long>(std::ceil((r_max - step) / step - 1e-9));
  for (long i = 0; i < n_steps; ++i) {
    const double hstep = std::min(step, r_max - r);
    const State k1 = rhs(r, s);
    const State k2 = rhs(r + 0.5 * hstep, {s.v + 0.5 * hstep * k1.v, s.dv + 0.5 * hstep * k1.dv});
    const State k3 = rhs(r + 0.5 * hstep, {s.v + 0.5 * hstep * k2.v, s.dv + 0.5 * hstep * k2.dv});
    const State k4 = rhs(r + hstep, {s.v + hstep * k3.v, s.dv + hstep * k3.dv});
    const State next{s.v + hstep / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
                     s.dv + hstep / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv)};
    if (!std::isfinite(next.v) || !std::isfinite(next.dv)) {
      if (s.dv > 0.0) {
        out.classification = ShootClass::stays_positive_diverges;
        return out;
      }
      throw ConvergenceError("shoot: non-finite state during integration");
    }
    s = next;
    r += hstep;
    out.trajectory.push_back({r, s.v, s.dv});
    if (s.v < kCrossThreshold) {
      out.classification = ShootClass::crosses_zero;
      return out;
    }
    if (s.dv > 0.0 && (s.v > kGrowthFactor * v0 || decreased)) {
      out.classification = ShootClass::stays_positive_diverges;
      return out;
    }
    if (s.dv < 0.0) decreased = true;
  }
  out.classification = ShootClass::converged_to_zero;
  return out;
}

ShootingSolution find_ground_state_shooting(const ModelProblem& model, const ShootingOptions& opt) {
  if (!(opt.tol_v0 > 0.0)) throw ValidationError("oracle.tol_v0 must be positive");
  if (opt.sweep_points < 2 || !(opt.sweep_min > 0.0) || !(opt.sweep_max > opt.sweep_min)) {
    throw ValidationError("oracle sweep range is invalid");
  }
  const TransformKernel kernel;
  const auto crosses = [&](double v0) {
    return shoot(model, opt.r_max, v0, opt.step, kernel).classification == ShootClass::crosses_zero;
  };

  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  const double ratio = std::pow(opt.sweep_max / opt.sweep_min, 1.0 / (opt.sweep_points - 1));
  double prev = opt.sweep_min;
  bool prev_cross = crosses(prev);
  for (int i = 1; i < opt.sweep_points && !found; ++i) {
    const double cur = opt.sweep_min * std::pow(ratio, i);
    const bool cur_cross = crosses(cur);
    if (cur_cross != prev_cross) {
      lo = prev_cross ? cur : prev;  // lo: does not cross
      hi = prev_cross ? prev : cur;
      found = true;
    }
    prev = cur;
    prev_cross = cur_cross;
  }
  if (!found) throw LookupError("oracle unavailable: no shooting bracket in the sweep range");

  ShootingSolution sol;
  sol.bracket_low = lo;
  sol.bracket_high = hi;
  sol.bisection_widths.push_back(std::abs(hi - lo));
  while (std::abs(hi - lo) > opt.tol_v0) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (crosses(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    sol.bisection_widths.push_back(std::abs(hi - lo));
  }
  // The non-crossing side stays nonnegative on the whole interval.
  sol.v0 = lo;
  sol.trajectory = shoot(model, opt.r_max, lo, opt.step, kernel);
  const GridPtr grid = make_grid(RadialGrid(opt.r_max, opt.m));
  const auto& traj = sol.trajectory.trajectory;
  sol.profile = Field::sample(grid, [&](Point x) { return interpolate_trajectory(traj, x.x1); });
  return sol;
}

double interpolate_trajectory(const std::vector<TrajectoryPoint>& t, double r) {
  if (t.empty() || r > t.back().r) return 0.0;
  if (r <= t.front().r) return t.front().v;
  const auto it = std::lower_bound(t.begin(), t.end(), r, [](const TrajectoryPoint& p, double x) { return p.r < x; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (r - a.r) / (b.r - a.r);
  return (1.0 - w) * a.v + w * b.v;
}

namespace {

double bilinear(const Grid2D& g, std::span<const double> v, double x, double y) {
  const int n = g.n();
  const double h = g.spacing();
  // Index space including the zero halo at -1 and n.
  const double fx = (x + g.half_width()) / h - 1.0;
  const double fy = (y + g.half_width()) / h - 1.0;
  if (fx < -1.0 || fy < -1.0 || fx > n || fy > n) return 0.0;
  const int i0 = std::min(static_cast<int>(std::floor(fx)), n - 1);
  const int j0 = std::min(static_cast<int>(std::floor(fy)), n - 1);
  const double tx = fx - i0;
  const double ty = fy - j0;
  const auto at = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
    return v[g.index(i, j)];
  };
  return (1 - tx) * (1 - ty) * at(i0, j0) + tx * (1 - ty) * at(i0 + 1, j0) + (1 - tx) * ty * at(i0, j0 + 1) +
         tx * ty * at(i0 + 1, j0 + 1);
}

double radial_linear(const RadialGrid& g, std::span<const double> v, double r) {
  const double x = r / g.spacing();
  if (x >= g.m()) return 0.0;
  const auto i = static_cast<std::size_t>(std::floor(x));
  const double t = x - static_cast<double>(i);
  const double right = i + 1 < v.size() ? v[i + 1] : 0.0;
  return (1.0 - t) * v[i] + t * right;
}

}  // namespace

Field radial_average(const Field& field, const GridPtr& target, int angles) {
  const auto* g = std::get_if<Grid2D>(&field.grid());
  if (!g) throw DomainError("radial_average: source must be a 2D field");
  const auto* rg = std::get_if<RadialGrid>(target.get());
  if (!rg) throw DomainError("radial_average: target must be radial");
  if (angles < 1) throw DomainError("radial_average: need at least one angle");
  Field out(target);
  const auto v = field.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = rg->radius(i);
    double s = 0.0;
    for (int k = 0; k < angles; ++k) {
      const double a = 2.0 * std::numbers::pi * k / angles;
      s += bilinear(*g, v, r * std::cos(a), r * std::sin(a));
    }
    out[i] = s / angles;
  }
  return out;
}

double compare_profiles(const Field& a, const Field& b) {
  const auto* rb = std::get_if<RadialGrid>(&b.grid());
  if (!rb) throw DomainError("compare_profiles: reference must be radial");
  Field ar(b.grid_ptr());
  if (std::holds_alternative<Grid2D>(a.grid())) {
    ar = radial_average(a, b.grid_ptr());
  } else if (same_grid(a.grid(), b.grid())) {
    ar = Field(b.grid_ptr(), std::vector<double>(a.values().begin(), a.values().end()));
  } else {
    const auto& ra = std::get<RadialGrid>(a.grid());
    for (std::size_t i = 0; i < ar.size(); ++i) ar[i] = radial_linear(ra, a.values(), rb->radius(i));
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double w = rb->weight(i);
    const double d = ar[i] - b[i];
    num += w * d * d;
    den += w * b[i] * b[i];
  }
  if (!(den > 0.0)) throw DomainError("compare_profiles: reference profile is identically zero");
  return std::sqrt(num / den);
}

}  // namespace qlmp
