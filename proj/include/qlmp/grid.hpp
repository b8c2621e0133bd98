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

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "qlmp/model.hpp"

namespace qlmp {

/// Interior nodes of [-R, R]^2 with spacing 2R/(n+1); boundary values are zero.
class Grid2D {
 public:
  Grid2D(double half_width, int n);

  [[nodiscard]] double half_width() const noexcept { return half_width_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }
  [[nodiscard]] std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }
  [[nodiscard]] std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  [[nodiscard]] double coordinate(int i) const noexcept { return -half_width_ + (i + 1) * spacing_; }
  [[nodiscard]] Point position(std::size_t k) const noexcept;
  [[nodiscard]] double weight(std::size_t) const noexcept { return spacing_ * spacing_; }

 private:
  double half_width_;
  int n_;
  double spacing_;
  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Radial line r_i = i*dr, i = 0..m-1, dr = r_max/m, with v(r_max) = 0.
///
/// Finite-volume layout: node i owns the annulus [r_i - dr/2, r_i + dr/2]
/// (a disc of radius dr/2 for the axis node), faces carry 2*pi*r_face/dr.
/// The axis face has zero flux, which is the v'(0) = 0 condition and
/// reproduces the ghost-symmetric stencil 4(v_0 - v_1)/dr^2 at r = 0.
class RadialGrid {
 public:
  RadialGrid(double r_max, int m);

  [[nodiscard]] double r_max() const noexcept { return r_max_; }
  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return static_cast<std::size_t>(m_); }
  [[nodiscard]] double radius(std::size_t i) const noexcept { return static_cast<double>(i) * spacing_; }
  [[nodiscard]] Point position(std::size_t i) const noexcept { return {radius(i), 0.0}; }
  [[nodiscard]] double weight(std::size_t i) const noexcept;
  /// Conductance of the face between node i and i+1 (i+1 == m is the boundary).
  [[nodiscard]] double face_conductance(std::size_t i) const noexcept;

 private:
  double r_max_;
  int m_;
  double spacing_;
  friend bool operator==(const RadialGrid&, const RadialGrid&) = default;
};

using Grid = std::variant<Grid2D, RadialGrid>;
using GridPtr = std::shared_ptr<const Grid>;

[[nodiscard]] GridPtr make_grid(Grid2D grid);
[[nodiscard]] GridPtr make_grid(RadialGrid grid);

/// Same geometry (pointer identity not required).
[[nodiscard]] bool same_grid(const Grid& a, const Grid& b);
[[nodiscard]] std::size_t node_count(const Grid& grid);
[[nodiscard]] Point node_position(const Grid& grid, std::size_t k);
[[nodiscard]] std::vector<double> quadrature_weights(const Grid& grid);
[[nodiscard]] std::vector<Point> node_positions(const Grid& grid);

/// Sentinel for an edge that ends on the zero Dirichlet boundary.
inline constexpr std::ptrdiff_t kBoundary = -1;

/// Visits every edge once, in a fixed order, as fn(i, j, conductance) with
/// j == kBoundary for edges to the boundary. The discrete Dirichlet energy
/// is the sum of conductance * (v_i - v_j)^2.
template <class Fn>
void for_each_edge(const Grid& grid, Fn&& fn) {
  if (const auto* g = std::get_if<Grid2D>(&grid)) {
    const int n = g->n();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto k = static_cast<std::ptrdiff_t>(g->index(i, j));
        if (i == 0) fn(k, kBoundary, 1.0);
        if (j == 0) fn(k, kBoundary, 1.0);
        fn(k, i + 1 < n ? static_cast<std::ptrdiff_t>(g->index(i + 1, j)) : kBoundary, 1.0);
        fn(k, j + 1 < n ? static_cast<std::ptrdiff_t>(g->index(i, j + 1)) : kBoundary, 1.0);
      }
    }
  } else {
    const auto& r = std::get<RadialGrid>(grid);
    const auto m = static_cast<std::ptrdiff_t>(r.m());
    for (std::ptrdiff_t i = 0; i < m; ++i) {
      fn(i, i + 1 < m ? i + 1 : kBoundary, r.face_conductance(static_cast<std::size_t>(i)));
    }
  }
}

/// Nodal values on a grid.
class Field {
 public:
  /// Empty placeholder without a grid; assign before use.
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);

  static Field sample(GridPtr grid, const std::function<double(Point)>& fn);

  [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
  [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t k) const noexcept { return values_[k]; }
  [[nodiscard]] double& operator[](std::size_t k) noexcept { return values_[k]; }

  /// this += alpha * other
  Field& axpy(double alpha, const Field& other);
  Field& operator+=(const Field& other) { return axpy(1.0, other); }
  Field& operator-=(const Field& other) { return axpy(-1.0, other); }
  Field& operator*=(double alpha);

  [[nodiscard]] bool all_finite() const noexcept;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

[[nodiscard]] Field operator+(Field a, const Field& b);
[[nodiscard]] Field operator-(Field a, const Field& b);
[[nodiscard]] Field operator*(double alpha, Field a);

/// Plain nodal sum of v_k * w_k (the pairing of a gradient with a direction).
[[nodiscard]] double dot(const Field& a, const Field& b);
[[nodiscard]] double max_abs(const Field& a);

/// -Delta_h v with zero Dirichlet halo.
[[nodiscard]] Field laplacian_apply(const Field& field);
/// Stiffness action K v = W (-Delta_h v), the gradient of half the Dirichlet energy.
[[nodiscard]] Field stiffness_apply(const Field& field);
[[nodiscard]] double integrate(const Field& field);
/// Discrete int |grad v|^2.
[[nodiscard]] double dirichlet_energy(const Field& field);
/// Discrete int grad v . grad w.
[[nodiscard]] double dirichlet_form(const Field& a, const Field& b);

/// Solves (K + alpha W) x = rhs; used as the H^1-type preconditioner.
class ShiftedStiffnessSolver {
 public:
  ShiftedStiffnessSolver(GridPtr grid, double alpha);
  ~ShiftedStiffnessSolver();
  ShiftedStiffnessSolver(const ShiftedStiffnessSolver&) = delete;
  ShiftedStiffnessSolver& operator=(const ShiftedStiffnessSolver&) = delete;
  ShiftedStiffnessSolver(ShiftedStiffnessSolver&&) noexcept;
  ShiftedStiffnessSolver& operator=(ShiftedStiffnessSolver&&) noexcept;

  [[nodiscard]] Field solve(const Field& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qlmp
