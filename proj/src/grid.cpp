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

#include "qlmp/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "qlmp/error.hpp"

namespace qlmp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void require_same_grid(const Field& a, const Field& b) {
  if (a.size() != b.size() || !(a.grid_ptr() == b.grid_ptr() || same_grid(a.grid(), b.grid()))) {
    throw DomainError("fields live on different grids");
  }
}

}  // namespace

Grid2D::Grid2D(double half_width, int n) : half_width_(half_width), n_(n), spacing_(0.0) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw DomainError("Grid2D: R must be positive");
  if (n < 3) throw DomainError("Grid2D: n must be at least 3");
  spacing_ = 2.0 * half_width / (n + 1);
}

Point Grid2D::position(std::size_t k) const noexcept {
  const auto nn = static_cast<std::size_t>(n_);
  return {coordinate(static_cast<int>(k / nn)), coordinate(static_cast<int>(k % nn))};
}

RadialGrid::RadialGrid(double r_max, int m) : r_max_(r_max), m_(m), spacing_(0.0) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw DomainError("RadialGrid: r_max must be positive");
  if (m < 3) throw DomainError("RadialGrid: m must be at least 3");
  spacing_ = r_max / m;
}

double RadialGrid::weight(std::size_t i) const noexcept {
  if (i == 0) return 0.25 * std::numbers::pi * spacing_ * spacing_;
  return kTwoPi * radius(i) * spacing_;
}

double RadialGrid::face_conductance(std::size_t i) const noexcept {
  return kTwoPi * (static_cast<double>(i) + 0.5);
}

GridPtr make_grid(Grid2D grid) { return std::make_shared<const Grid>(grid); }
GridPtr make_grid(RadialGrid grid) { return std::make_shared<const Grid>(grid); }

bool same_grid(const Grid& a, const Grid& b) { return a == b; }

std::size_t node_count(const Grid& grid) {
  return std::visit([](const auto& g) { return g.node_count(); }, grid);
}

Point node_position(const Grid& grid, std::size_t k) {
  return std::visit([k](const auto& g) { return g.position(k); }, grid);
}

std::vector<double> quadrature_weights(const Grid& grid) {
  return std::visit(
      [](const auto& g) {
        std::vector<double> w(g.node_count());
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = g.weight(k);
        return w;
      },
      grid);
}

std::vector<Point> node_positions(const Grid& grid) {
  std::vector<Point> out(node_count(grid));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = node_position(grid, k);
  return out;
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw DomainError("Field: null grid");
  values_.assign(node_count(*grid_), 0.0);
}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DomainError("Field: null grid");
  if (values_.size() != node_count(*grid_)) throw DomainError("Field: value count does not match grid");
  if (!all_finite()) throw DomainError("Field: non-finite value");
}

Field Field::sample(GridPtr grid, const std::function<double(Point)>& fn) {
  Field out(grid);
  for (std::size_t k = 0; k < out.size(); ++k) out.values_[k] = fn(node_position(*grid, k));
  if (!out.all_finite()) throw DomainError("Field::sample: non-finite value");
  return out;
}

Field& Field::axpy(double alpha, const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += alpha * other.values_[k];
  return *this;
}

Field& Field::operator*=(double alpha) {
  for (double& x : values_) x *= alpha;
  return *this;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

Field operator+(Field a, const Field& b) { return std::move(a += b); }
Field operator-(Field a, const Field& b) { return std::move(a -= b); }
Field operator*(double alpha, Field a) { return std::move(a *= alpha); }

double dot(const Field& a, const Field& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double max_abs(const Field& a) {
  double m = 0.0;
  for (double x : a.values()) m = std::max(m, std::abs(x));
  return m;
}

Field stiffness_apply(const Field& field) {
  Field out(field.grid_ptr());
  const auto v = field.values();
  auto o = out.values();
  for_each_edge(field.grid(), [&](std::ptrdiff_t i, std::ptrdiff_t j, double c) {
    if (j == kBoundary) {
      o[i] += c * v[i];
    } else {
      const double flux = c * (v[i] - v[j]);
      o[i] += flux;
      o[j] -= flux;
    }
  });
  return out;
}

Field laplacian_apply(const Field& field) {
  Field out = stiffness_apply(field);
  const auto w = quadrature_weights(field.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] /= w[k];
  return out;
}

double integrate(const Field& field) {
  return std::visit(
      [&](const auto& g) {
        double s = 0.0;
        for (std::size_t k = 0; k < field.size(); ++k) s += g.weight(k) * field[k];
        return s;
      },
      field.grid());
}

double dirichlet_form(const Field& a, const Field& b) {
  require_same_grid(a, b);
  const auto x = a.values();
  const auto y = b.values();
  double s = 0.0;
  for_each_edge(a.grid(), [&](std::ptrdiff_t i, std::ptrdiff_t j, double c) {
    const double dx = j == kBoundary ? x[i] : x[i] - x[j];
    const double dy = j == kBoundary ? y[i] : y[i] - y[j];
    s += c * dx * dy;
  });
  return s;
}

double dirichlet_energy(const Field& field) { return dirichlet_form(field, field); }

// 2D: diagonalised by the type-I sine transform. Radial: tridiagonal sweep.
struct ShiftedStiffnessSolver::Impl {
  GridPtr grid;
  double alpha = 1.0;

  // 2D
  int n = 0;
  double* buffer = nullptr;
  fftw_plan plan = nullptr;
  std::vector<double> denominators;

  // radial
  std::vector<double> diag;
  std::vector<double> upper;  // coupling between i and i+1

  ~Impl() {
    std::lock_guard lock(fftw_planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buffer) fftw_free(buffer);
  }
};

ShiftedStiffnessSolver::ShiftedStiffnessSolver(GridPtr grid, double alpha) : impl_(std::make_unique<Impl>()) {
  if (!grid) throw DomainError("ShiftedStiffnessSolver: null grid");
  if (!(alpha > 0.0)) throw DomainError("ShiftedStiffnessSolver: alpha must be positive");
  impl_->grid = grid;
  impl_->alpha = alpha;
  if (const auto* g = std::get_if<Grid2D>(grid.get())) {
    const int n = g->n();
    impl_->n = n;
    const double h2 = g->spacing() * g->spacing();
    std::vector<double> lam(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double s = std::sin(std::numbers::pi * (k + 1) / (2.0 * (n + 1)));
      lam[static_cast<std::size_t>(k)] = 4.0 * s * s;
    }
    impl_->denominators.resize(g->node_count());
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        impl_->denominators[g->index(a, b)] =
            lam[static_cast<std::size_t>(a)] + lam[static_cast<std::size_t>(b)] + alpha * h2;
      }
    }
    std::lock_guard lock(fftw_planner_mutex());
    impl_->buffer = static_cast<double*>(fftw_malloc(sizeof(double) * g->node_count()));
    impl_->plan = fftw_plan_r2r_2d(n, n, impl_->buffer, impl_->buffer, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    if (!impl_->plan) throw Error("ShiftedStiffnessSolver: FFTW planning failed");
  } else {
    const auto& r = std::get<RadialGrid>(*grid);
    const std::size_t m = r.node_count();
    impl_->diag.assign(m, 0.0);
    impl_->upper.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double c = r.face_conductance(i);
      impl_->diag[i] += c + alpha * r.weight(i);
      if (i + 1 < m) {
        impl_->diag[i + 1] += c;
        impl_->upper[i] = -c;
      }
    }
  }
}

ShiftedStiffnessSolver::~ShiftedStiffnessSolver() = default;
ShiftedStiffnessSolver::ShiftedStiffnessSolver(ShiftedStiffnessSolver&&) noexcept = default;
ShiftedStiffnessSolver& ShiftedStiffnessSolver::operator=(ShiftedStiffnessSolver&&) noexcept = default;

Field ShiftedStiffnessSolver::solve(const Field& rhs) const {
  if (rhs.grid_ptr() != impl_->grid && !same_grid(rhs.grid(), *impl_->grid)) {
    throw DomainError("ShiftedStiffnessSolver: field on a different grid");
  }
  Field out(impl_->grid);
  if (impl_->n > 0) {
    const std::size_t count = rhs.size();
    std::copy(rhs.values().begin(), rhs.values().end(), impl_->buffer);
    fftw_execute(impl_->plan);
    for (std::size_t k = 0; k < count; ++k) impl_->buffer[k] /= impl_->denominators[k];
    fftw_execute(impl_->plan);
    const double scale = 1.0 / (4.0 * (impl_->n + 1.0) * (impl_->n + 1.0));
    for (std::size_t k = 0; k < count; ++k) out[k] = impl_->buffer[k] * scale;
    return out;
  }
  // Thomas algorithm on the symmetric tridiagonal system.
  const std::size_t m = rhs.size();
  std::vector<double> c_prime(m, 0.0);
  std::vector<double> d_prime(m, 0.0);
  c_prime[0] = impl_->upper[0] / impl_->diag[0];
  d_prime[0] = rhs[0] / impl_->diag[0];
  for (std::size_t i = 1; i < m; ++i) {
    const double denom = impl_->diag[i] - impl_->upper[i - 1] * c_prime[i - 1];
    c_prime[i] = impl_->upper[i] / denom;
    d_prime[i] = (rhs[i] - impl_->upper[i - 1] * d_prime[i - 1]) / denom;
  }
  out[m - 1] = d_prime[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) out[i] = d_prime[i] - c_prime[i] * out[i + 1];
  return out;
}

}  // namespace qlmp
