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

#include <span>

namespace qlmp {

/// Values of the Orlicz kernel L(v) = f(v)^2 and its first two derivatives.
struct OrliczValues {
  double L;
  double L1;
  double L2;
};

/// f(v) together with f'(v); most callers need both.
struct InverseWithSlope {
  double u;
  double slope;
};

/// Scalar kernel of the dual change of variables.
///
/// The forward map h(u) = u*sqrt(1+u^2)/2 + asinh(u)/2 satisfies
/// h'(u) = sqrt(1+u^2). Its inverse f has no closed form and is computed by
/// a safeguarded Newton iteration bracketed on [0, |v|], which is valid
/// because |f(v)| <= |v|. Every member is a pure function of its argument.
class TransformKernel {
 public:
  TransformKernel() = default;
  TransformKernel(double newton_tol, int max_newton_iters, double exp_guard);

  [[nodiscard]] double newton_tol() const noexcept { return newton_tol_; }
  [[nodiscard]] int max_newton_iters() const noexcept { return max_newton_iters_; }
  [[nodiscard]] double exp_guard() const noexcept { return exp_guard_; }

  [[nodiscard]] double h_forward(double u) const;
  [[nodiscard]] double f_inverse(double v) const;
  [[nodiscard]] double f_prime(double v) const;
  [[nodiscard]] InverseWithSlope f_with_slope(double v) const;
  [[nodiscard]] OrliczValues orlicz_kernel(double v) const;

 private:
  double newton_tol_ = 1e-12;
  int max_newton_iters_ = 60;
  double exp_guard_ = 700.0;
};

/// Smallest C with L(2v) <= C L(v) over the given nonzero samples.
[[nodiscard]] double fit_doubling_constant(const TransformKernel& kernel,
                                           std::span<const double> v_samples);

}  // namespace qlmp
