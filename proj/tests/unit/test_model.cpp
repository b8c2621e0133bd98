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

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "qlmp/error.hpp"
#include "qlmp/model.hpp"

using namespace qlmp;

namespace {

HypothesisReport audit(const ModelProblem& m, std::optional<double> sp = std::nullopt) {
  const auto s = default_s_samples(m);
  const auto x = default_x_samples();
  return check_hypotheses(m, s, x, sp);
}

}  // namespace

TEST_CASE("builtin models expose the documented constants") {
  for (auto name : builtin_model_names()) {
    const auto m = builtin_model(name);
    CHECK(m.theta == 6.0);
    CHECK(m.p == 6.0);
    CHECK(m.V0 == (m.constant_potential ? 2.0 : 1.0));
    CHECK(m.V1 == 2.0);
  }
  CHECK_THROWS_AS((void)builtin_model("nope"), LookupError);
}

TEST_CASE("power model: g(x,2) = 32 Cp and theta G = s g") {
  const auto m = builtin_model("power", {.Cp = 7.0});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Point x{testing::uniform(rng, -3, 3), testing::uniform(rng, -3, 3)};
    CHECK(m.nonlinearity(x, 2.0) == doctest::Approx(7.0 * 32.0).epsilon(1e-15));
    const double s = testing::uniform(rng, 0.0, 5.0);
    CHECK(m.theta * m.primitive(x, s) == doctest::Approx(s * m.nonlinearity(x, s)).epsilon(1e-14));
  }
}

TEST_CASE("critical model: g/s -> 0 at the origin and primitive matches quadrature") {
  const auto m = builtin_model("critical", {.Cp = 3.0});
  const Point x{0.3, 0.7};
  double prev = 1.0;
  for (double s = 1e-1; s > 1e-7; s *= 0.1) {
    const double ratio = m.nonlinearity(x, s) / s;
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK(prev < 1e-20);
  for (double s : {1e-3, 0.1, 0.5, 1.0, 1.5, 2.0, 2.5}) {
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return m.nonlinearity(x, t); }, 0.0, s, 15, 1e-13);
    CHECK(std::abs(m.primitive(x, s) - q) <= 1e-9 * (1.0 + q));
  }
}

TEST_CASE("constant_V_power has a flat potential at V1") {
  const auto m = builtin_model("constant_V_power");
  CHECK(m.constant_potential);
  for (double a : {0.0, 0.25, 0.5, 1.3}) CHECK(m.potential({a, 2 * a}) == 2.0);
}

TEST_CASE("cp_threshold closed form and domain") {
  CHECK(cp_threshold(6.0, 6.0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(cp_threshold(6.0, 6.0, 0.0) == 0.0);
  CHECK(cp_threshold(6.0, 6.0, 1e-8) < 1e-40);
  CHECK_THROWS_AS((void)cp_threshold(4.0, 6.0, 1.0), DomainError);
  CHECK_THROWS_AS((void)cp_threshold(6.0, 2.0, 1.0), DomainError);
  const double sp = testing::builtin_sp();
  CHECK(testing::calibrated("power").Cp == doctest::Approx(1.5 * cp_threshold(6, 6, sp)).epsilon(1e-14));
}

TEST_CASE("builtins pass H1-H6 with the calibrated Cp") {
  const double sp = testing::builtin_sp();
  for (auto name : builtin_model_names()) {
    CAPTURE(name);
    const auto rep = audit(testing::calibrated(name), sp);
    REQUIRE(rep.entries.size() == 6);
    CHECK(rep.passes_h1_to_h5());
    CHECK(rep.at("H6").status == HypothesisStatus::pass);
  }
}

TEST_CASE("H6 skipped without S_p and failing below the threshold") {
  const auto m = testing::calibrated("power");
  CHECK(audit(m).at("H6").status == HypothesisStatus::skipped);
  const auto low = builtin_model("power", {.Cp = 0.5 * cp_threshold(6, 6, testing::builtin_sp())});
  CHECK(audit(low, testing::builtin_sp()).at("H6").status == HypothesisStatus::fail);
}

TEST_CASE("mutations are caught") {
  SUBCASE("theta = 3 fails H4") {
    const auto rep = audit(builtin_model("power", {.theta = 3.0, .Cp = 10.0}));
    CHECK(rep.at("H4").status == HypothesisStatus::fail);
    CHECK_FALSE(rep.passes_h1_to_h5());
  }
  SUBCASE("g = s fails H2") {
    auto m = builtin_model("power", {.Cp = 10.0});
    m.nonlinearity = [](Point, double s) { return s; };
    m.primitive = [](Point, double s) { return 0.5 * s * s; };
    const auto rep = audit(m);
    CHECK(rep.at("H2").status == HypothesisStatus::fail);
  }
  SUBCASE("a wrong primitive fails H4") {
    auto m = builtin_model("power", {.Cp = 10.0});
    m.primitive = [](Point, double s) { return 10.0 * std::pow(s, 6) / 5.0; };
    CHECK(audit(m).at("H4").status == HypothesisStatus::fail);
  }
  SUBCASE("non-periodic V fails H1") {
    auto m = builtin_model("power", {.Cp = 10.0});
    m.potential = [](Point x) { return 1.0 + 0.1 * std::sin(0.5 * x.x1) * std::sin(0.5 * x.x1); };
    CHECK(audit(m).at("H1").status == HypothesisStatus::fail);
  }
  SUBCASE("decreasing g/s fails H5") {
    auto m = builtin_model("power", {.Cp = 10.0});
    m.nonlinearity = [](Point, double s) { return s * s * s / (1.0 + s * s * s * s); };
    m.primitive = [](Point, double s) { return 0.25 * std::log1p(s * s * s * s); };
    CHECK(audit(m).at("H5").status == HypothesisStatus::fail);
  }
}

TEST_CASE("property: periodicity and nonnegativity on random samples") {
  std::mt19937_64 rng(11);
  for (auto name : builtin_model_names()) {
    const auto m = testing::calibrated(name);
    for (int i = 0; i < 200; ++i) {
      const Point x{testing::uniform(rng, -5, 5), testing::uniform(rng, -5, 5)};
      const double s = testing::uniform(rng, 0.0, 2.0);
      for (Point shifted : {Point{x.x1 + 1, x.x2}, Point{x.x1, x.x2 + 1}}) {
        CHECK(std::abs(m.potential(shifted) - m.potential(x)) <= 1e-12);
        CHECK(std::abs(m.nonlinearity(shifted, s) - m.nonlinearity(x, s)) <= 1e-12 * (1 + m.nonlinearity(x, s)));
      }
      CHECK(m.potential(x) >= m.V0);
      CHECK(m.potential(x) <= m.V1);
      CHECK(m.nonlinearity(x, s) >= 0.0);
      CHECK(m.primitive(x, s) >= 0.0);
    }
  }
}

TEST_CASE("property: g/s increasing on the sample ladder") {
  for (auto name : builtin_model_names()) {
    const auto m = testing::calibrated(name);
    const auto s = default_s_samples(m);
    const Point x{0.25, 0.6};
    for (std::size_t i = 1; i < s.size(); ++i) {
      CHECK(m.nonlinearity(x, s[i - 1]) / s[i - 1] <= m.nonlinearity(x, s[i]) / s[i] + 1e-12);
    }
  }
}
