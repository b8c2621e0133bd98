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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "qlmp/error.hpp"
#include "qlmp/transform.hpp"

using qlmp::TransformKernel;

namespace {

// Independent inverse: plain bisection on the closed form of h.
double h_closed(double u) { return 0.5 * u * std::sqrt(1.0 + u * u) + 0.5 * std::log(u + std::sqrt(1.0 + u * u)); }

double bisect_inverse(double v) {
  double lo = 0.0;
  double hi = std::max(1.0, v);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h_closed(mid) < v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> dense(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("h_forward closed-form values and oddness") {
  const TransformKernel k;
  CHECK(k.h_forward(0.0) == 0.0);
  CHECK(k.h_forward(1.0) == doctest::Approx(1.1477935746963191).epsilon(1e-15));
  for (double u : dense(0.01, 40.0, 200)) CHECK(k.h_forward(-u) == -k.h_forward(u));
  CHECK_THROWS_AS((void)k.h_forward(std::numeric_limits<double>::quiet_NaN()), qlmp::DomainError);
  CHECK_THROWS_AS((void)k.h_forward(std::numeric_limits<double>::infinity()), qlmp::DomainError);
}

TEST_CASE("h_forward stays accurate at extreme arguments") {
  const TransformKernel k;
  // u sqrt(1+u^2)/2 dominates; the log term is ln(2u)/2 to relative 1e-16.
  const double u = 3e9;
  const double expected = 0.5 * u * u * std::sqrt(1.0 + 1.0 / (u * u)) + 0.5 * std::log(2.0 * u);
  CHECK(k.h_forward(u) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("f_inverse examples") {
  const TransformKernel k;
  CHECK(k.f_inverse(0.0) == 0.0);
  CHECK(k.f_inverse(k.h_forward(1.5)) == doctest::Approx(1.5).epsilon(1e-14));
  const double u = k.f_inverse(1000.0);
  CHECK(u == doctest::Approx(bisect_inverse(1000.0)).epsilon(1e-13));
  CHECK(u > 44.0);
  CHECK(u < 45.0);
  CHECK(std::abs(k.h_forward(u) - 1000.0) <= k.newton_tol() * 1000.0);
}

TEST_CASE("f_prime examples") {
  const TransformKernel k;
  CHECK(k.f_prime(0.0) == 1.0);
  CHECK(k.f_prime(k.h_forward(1.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  const double big = k.f_prime(1e6);
  CHECK(big > 0.0);
  CHECK(big < 1e-2);
  CHECK(big == doctest::Approx(1.0 / std::sqrt(1.0 + std::pow(bisect_inverse(1e6), 2))).epsilon(1e-12));
  for (double v : dense(-30.0, 30.0, 61)) {
    if (v != 0.0) CHECK(k.f_prime(v) < 1.0);
  }
}

TEST_CASE("orlicz_kernel examples and convexity") {
  const TransformKernel k;
  const auto z = k.orlicz_kernel(0.0);
  CHECK(z.L == 0.0);
  CHECK(z.L1 == 0.0);
  CHECK(z.L2 == 2.0);
  const auto one = k.orlicz_kernel(k.h_forward(1.0));
  CHECK(one.L == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.L1 == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(one.L2 == doctest::Approx(0.5).epsilon(1e-14));
  for (double v : dense(-100.0, 100.0, 401)) CHECK(k.orlicz_kernel(v).L2 > 0.0);
}

TEST_CASE("orlicz_kernel derivatives match finite differences") {
  const TransformKernel k;
  for (double v : dense(-20.0, 20.0, 81)) {
    const double e = 1e-5;
    const double d1 = (k.orlicz_kernel(v + e).L - k.orlicz_kernel(v - e).L) / (2 * e);
    const double d2 = (k.orlicz_kernel(v + e).L1 - k.orlicz_kernel(v - e).L1) / (2 * e);
    CHECK(d1 == doctest::Approx(k.orlicz_kernel(v).L1).epsilon(1e-7));
    CHECK(d2 == doctest::Approx(k.orlicz_kernel(v).L2).epsilon(1e-6));
  }
}

TEST_CASE("doubling constant fitted below 8") {
  const TransformKernel k;
  std::vector<double> v;
  for (int i = 0; i < 2000; ++i) v.push_back(std::pow(10.0, -6.0 + 12.0 * i / 1999.0));
  const double C = qlmp::fit_doubling_constant(k, v);
  CHECK(C <= 8.0);
  CHECK(C == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("property: round trip, slope identity, monotonicity, growth bounds") {
  const TransformKernel k;
  const auto us = dense(-50.0, 50.0, 10000);
  double prev_h = -std::numeric_limits<double>::infinity();
  for (double u : us) {
    const double v = k.h_forward(u);
    CHECK(std::abs(k.f_inverse(v) - u) <= 10.0 * k.newton_tol());
    CHECK(v > prev_h);
    prev_h = v;
  }
  double prev_f = -std::numeric_limits<double>::infinity();
  for (double v : dense(-1e4, 1e4, 4001)) {
    const auto [u, slope] = k.f_with_slope(v);
    CHECK(slope * std::sqrt(1.0 + u * u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u > prev_f);
    prev_f = u;
    CHECK(std::abs(u) <= std::abs(v));
    CHECK(u * u <= 2.0 * std::abs(v) + 1e-12);
  }
}

TEST_CASE("property: h' matches sqrt(1+u^2)") {
  const TransformKernel k;
  for (double u : dense(-50.0, 50.0, 1001)) {
    const double e = 1e-5;
    const double fd = (k.h_forward(u + e) - k.h_forward(u - e)) / (2 * e);
    CHECK(std::abs(fd - std::sqrt(1.0 + u * u)) <= 1e-6 * std::sqrt(1.0 + u * u));
  }
}

TEST_CASE("kernel configuration is validated") {
  CHECK_THROWS_AS(TransformKernel(0.0, 60, 700.0), qlmp::DomainError);
  CHECK_THROWS_AS(TransformKernel(1e-12, 0, 700.0), qlmp::DomainError);
  CHECK_THROWS_AS(TransformKernel(1e-12, 60, 701.0), qlmp::DomainError);
  CHECK_NOTHROW(TransformKernel(1e-10, 10, 300.0));
}
