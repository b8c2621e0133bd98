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

#include "qlmp/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qlmp/error.hpp"

namespace qlmp {
namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": non-finite argument");
  }
}

// asinh(u) for u >= 0, switching to log(2u) + log1p(1/(4u^2)) far out.
double asinh_nonneg(double u) {
  if (u > 1e8) {
    return std::log(2.0 * u) + std::log1p(0.25 / (u * u));
  }
  return std::asinh(u);
}

double h_nonneg(double u) {
  return 0.5 * u * std::hypot(1.0, u) + 0.5 * asinh_nonneg(u);
}

}  // namespace

TransformKernel::TransformKernel(double newton_tol, int max_newton_iters, double exp_guard)
    : newton_tol_(newton_tol), max_newton_iters_(max_newton_iters), exp_guard_(exp_guard) {
  if (!(newton_tol > 0.0)) throw DomainError("TransformKernel: newton_tol must be > 0");
  if (max_newton_iters < 1) throw DomainError("TransformKernel: max_newton_iters must be >= 1");
  if (!(exp_guard <= 700.0) || !(exp_guard > 0.0)) {
    throw DomainError("TransformKernel: exp_guard must lie in (0, 700]");
  }
}

double TransformKernel::h_forward(double u) const {
  require_finite(u, "h_forward");
  const double a = std::abs(u);
  return std::copysign(h_nonneg(a), u);
}

double TransformKernel::f_inverse(double v) const {
  require_finite(v, "f_inverse");
  const double target = std::abs(v);
  if (target == 0.0) return v;

  double lo = 0.0;
  double hi = target;
  double u = target <= 1.0 ? target : std::min(target, std::sqrt(2.0 * target));
  const double residual_tol = newton_tol_ * std::max(1.0, target);

  for (int it = 0; it < max_newton_iters_; ++it) {
    const double r = h_nonneg(u) - target;
    if (r > 0.0) {
      hi = std::min(hi, u);
    } else {
      lo = std::max(lo, u);
    }
    double next = u - r / std::hypot(1.0, u);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - u);
    u = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * u) {
      return std::copysign(u, v);
    }
  }
  if (std::abs(h_nonneg(u) - target) <= residual_tol) return std::copysign(u, v);
  throw ConvergenceError("f_inverse: no convergence for v = " + std::to_string(v));
}

double TransformKernel::f_prime(double v) const {
  return 1.0 / std::hypot(1.0, f_inverse(v));
}

InverseWithSlope TransformKernel::f_with_slope(double v) const {
  const double u = f_inverse(v);
  return {u, 1.0 / std::hypot(1.0, u)};
}

OrliczValues TransformKernel::orlicz_kernel(double v) const {
  const double u = f_inverse(v);
  const double one_plus = 1.0 + u * u;
  return {u * u, 2.0 * u / std::sqrt(one_plus), 2.0 / (one_plus * one_plus)};
}

double fit_doubling_constant(const TransformKernel& kernel, std::span<const double> v_samples) {
  double worst = 0.0;
  for (double v : v_samples) {
    if (v == 0.0) continue;
    const double base = kernel.orlicz_kernel(v).L;
    if (base <= 0.0) continue;
    worst = std::max(worst, kernel.orlicz_kernel(2.0 * v).L / base);
  }
  return worst;
}

}  // namespace qlmp
