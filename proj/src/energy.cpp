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

#include "qlmp/energy.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>

#include "qlmp/error.hpp"

namespace qlmp {

DiscreteFunctional::DiscreteFunctional(ModelProblem model, GridPtr grid, TransformKernel kernel)
    : model_(std::move(model)), grid_(std::move(grid)), kernel_(kernel) {
  if (!grid_) throw DomainError("DiscreteFunctional: null grid");
  if (!model_.potential || !model_.nonlinearity || !model_.primitive) {
    throw DomainError("DiscreteFunctional: model is missing V, g or G");
  }
  positions_ = node_positions(*grid_);
  weights_ = quadrature_weights(*grid_);
  V_.resize(positions_.size());
  for (std::size_t k = 0; k < V_.size(); ++k) V_[k] = model_.potential(positions_[k]);
  guard_amplitude_ = model_.safe_amplitude(kernel_.exp_guard());
}

bool DiscreteFunctional::on_grid(const Field& v) const {
  return v.grid_ptr() == grid_ || (v.grid_ptr() && same_grid(v.grid(), *grid_));
}

void DiscreteFunctional::guard(double u, std::size_t node) const {
  if (!std::isfinite(u)) throw EvaluationError("non-finite field value", node);
  if (std::abs(u) > guard_amplitude_) throw EvaluationError("exponent guard exceeded", node);
}

EnergyBreakdown DiscreteFunctional::j_bar(const Field& v) const {
  if (!on_grid(v)) throw DomainError("j_bar: field on a different grid");
  EnergyBreakdown e;
  e.kinetic = 0.5 * dirichlet_energy(v);
  double pot = 0.0;
  double nl = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double u = kernel_.f_inverse(v[k]);
    guard(u, k);
    pot += weights_[k] * V_[k] * u * u;
    nl += weights_[k] * model_.primitive(positions_[k], u);
  }
  e.potential = 0.5 * pot;
  e.nonlinear = nl;
  e.total = e.kinetic + e.potential - e.nonlinear;
  if (!std::isfinite(e.total)) throw EvaluationError("non-finite energy", 0);
  return e;
}

double DiscreteFunctional::j(const Field& u) const {
  if (!on_grid(u)) throw DomainError("j: field on a different grid");
  std::vector<double> hv(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    guard(u[k], k);
    hv[k] = kernel_.h_forward(u[k]);
  }
  double kin = 0.0;
  for_each_edge(*grid_, [&](std::ptrdiff_t i, std::ptrdiff_t jn, double c) {
    const double d = jn == kBoundary ? hv[i] : hv[i] - hv[jn];
    kin += c * d * d;
  });
  double pot = 0.0;
  double nl = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    pot += weights_[k] * V_[k] * u[k] * u[k];
    nl += weights_[k] * model_.primitive(positions_[k], u[k]);
  }
  return 0.5 * kin + 0.5 * pot - nl;
}

Field DiscreteFunctional::gradient(const Field& v) const {
  if (!on_grid(v)) throw DomainError("gradient: field on a different grid");
  Field out = stiffness_apply(v);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto [u, slope] = kernel_.f_with_slope(v[k]);
    guard(u, k);
    const double g = model_.nonlinearity(positions_[k], u);
    out[k] += weights_[k] * (V_[k] * u - g) * slope;
  }
  if (!out.all_finite()) throw EvaluationError("non-finite gradient", 0);
  return out;
}

double DiscreteFunctional::constraint_norm_sq(const Field& v) const {
  double pot = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double u = kernel_.f_inverse(v[k]);
    pot += weights_[k] * V_[k] * u * u;
  }
  return dirichlet_energy(v) + pot;
}

double DiscreteFunctional::orlicz_norm(const Field& v) const {
  if (!on_grid(v)) throw DomainError("orlicz_norm: field on a different grid");
  const double vmax = max_abs(v);
  if (vmax == 0.0) return 0.0;

  // zeta -> zeta (1 + int V L(v/zeta)), minimised over t = log zeta.
  const auto F = [&](double t) {
    const double zeta = std::exp(t);
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] != 0.0) s += weights_[k] * V_[k] * kernel_.orlicz_kernel(v[k] / zeta).L;
    }
    return zeta * (1.0 + s);
  };

  double b = std::log(vmax);
  double a = b - 1.0;
  double c = b + 1.0;
  double fa = F(a);
  double fb = F(b);
  double fc = F(c);
  constexpr std::int64_t kMaxExpansions = 1'000'000;
  std::int64_t it = 0;
  while (fa < fb || fc < fb) {
    if (++it > kMaxExpansions) throw ConvergenceError("orlicz_norm: bracket expansion failed");
    if (fa < fb) {
      c = b, fc = fb;
      b = a, fb = fa;
      a = b - 2.0 * (c - b), fa = F(a);
    } else {
      a = b, fa = fb;
      b = c, fb = fc;
      c = b + 2.0 * (b - a), fc = F(c);
    }
  }
  std::uintmax_t max_iter = 500;
  const auto [t_best, f_best] =
      boost::math::tools::brent_find_minima(F, a, c, std::numeric_limits<double>::digits / 2, max_iter);
  (void)t_best;
  return std::min(f_best, fb);
}

double DiscreteFunctional::h1l_norm(const Field& v) const {
  return std::sqrt(dirichlet_energy(v)) + orlicz_norm(v);
}

double DiscreteFunctional::square_h1_norm(const Field& v) const {
  Field w(grid_);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double u = kernel_.f_inverse(v[k]);
    w[k] = u * u;
  }
  double l2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) l2 += weights_[k] * w[k] * w[k];
  return std::sqrt(dirichlet_energy(w) + l2);
}

DiscreteFunctional::TestDirectionPairing DiscreteFunctional::pairing_with_f_over_fprime(const Field& v) const {
  Field phi(grid_);
  double pot = 0.0;
  double nl = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto [u, slope] = kernel_.f_with_slope(v[k]);
    guard(u, k);
    phi[k] = u / slope;
    pot += weights_[k] * V_[k] * u * u;
    nl += weights_[k] * model_.nonlinearity(positions_[k], u) * u;
  }
  TestDirectionPairing out;
  out.kinetic = dirichlet_form(v, phi);
  out.potential = pot;
  out.nonlinear = nl;
  out.total = out.kinetic + out.potential - out.nonlinear;
  return out;
}

EnergyBreakdown evaluate_J_bar(const ModelProblem& model, const Field& v) {
  return DiscreteFunctional(model, v.grid_ptr()).j_bar(v);
}

double evaluate_J(const ModelProblem& model, const Field& u) {
  return DiscreteFunctional(model, u.grid_ptr()).j(u);
}

Field gradient_J_bar(const ModelProblem& model, const Field& v) {
  return DiscreteFunctional(model, v.grid_ptr()).gradient(v);
}

double orlicz_norm(const ModelProblem& model, const Field& v) {
  return DiscreteFunctional(model, v.grid_ptr()).orlicz_norm(v);
}

double h1L_norm(const ModelProblem& model, const Field& v) {
  return DiscreteFunctional(model, v.grid_ptr()).h1l_norm(v);
}

double naive_quasilinear_kinetic(const Field& u) {
  const auto x = u.values();
  double s = 0.0;
  for_each_edge(u.grid(), [&](std::ptrdiff_t i, std::ptrdiff_t j, double c) {
    const double other = j == kBoundary ? 0.0 : x[j];
    const double mid = 0.5 * (x[i] + other);
    const double d = x[i] - other;
    s += c * (1.0 + mid * mid) * d * d;
  });
  return 0.5 * s;
}

Field scale_to_constraint(const DiscreteFunctional& functional, const Field& w, double rho) {
  if (!(rho > 0.0)) throw DomainError("scale_to_constraint: rho must be positive");
  const double base = functional.constraint_norm_sq(w);
  if (!(base > 0.0)) throw DomainError("scale_to_constraint: zero direction");
  const auto residual = [&](double s) { return functional.constraint_norm_sq(s * w) - rho * rho; };

  // Quadratic for small s, so this is already close; widen until bracketed.
  double lo = 0.5 * rho / std::sqrt(base);
  double hi = 2.0 * rho / std::sqrt(base);
  for (int i = 0; residual(lo) > 0.0; ++i) {
    if (i > 200) throw ConvergenceError("scale_to_constraint: bracket failed");
    lo *= 0.5;
  }
  for (int i = 0; residual(hi) < 0.0; ++i) {
    if (i > 200) throw ConvergenceError("scale_to_constraint: bracket failed");
    hi *= 2.0;
  }
  std::uintmax_t max_iter = 200;
  const auto [a, b] =
      boost::math::tools::toms748_solve(residual, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return 0.5 * (a + b) * w;
}

}  // namespace qlmp
