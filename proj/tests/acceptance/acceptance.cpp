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

// One line per acceptance criterion; exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "qlmp/cli.hpp"
#include "qlmp/energy.hpp"
#include "qlmp/model.hpp"
#include "qlmp/oracle.hpp"
#include "qlmp/solver.hpp"
#include "qlmp/transform.hpp"

using namespace qlmp;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr int kRoundTripSamples = 10'000;
constexpr double kRoundTripTol = 1e-10;
constexpr double kSlopeRelTol = 1e-6;
constexpr double kSlopeStep = 1e-5;
constexpr double kC1Seconds = 1.0;

constexpr int kIdentityFields = 50;
constexpr double kIdentityTol = 1e-9;
constexpr double kC2Seconds = 10.0;

constexpr int kGradientPairs = 20;
constexpr double kGradientRelTol = 1e-6;
constexpr double kGradientStep = 1e-6;
constexpr double kC3Seconds = 30.0;

constexpr double kSolveTol = 1e-5;
constexpr double kGridR = 6.0;
constexpr int kGridN = 128;
constexpr double kCpFactor = 1.5;
constexpr double kC4Seconds = 300.0;

constexpr double kNormBoundSlack = 1e-3;

constexpr int kGeometryDirections = 100;
constexpr double kGeometryRhos[] = {1e-3, 1e-2};

constexpr double kScaleInvarianceTol = 1e-10;
constexpr double kScaleFactors[] = {0.5, 2.0, 10.0};
constexpr int kGaussianSweep = 20;
constexpr double kSpreadTol = 0.01;
constexpr double kC7Seconds = 120.0;

constexpr double kProfileTol = 0.02;
constexpr double kCriticalityFactor = 10.0;
constexpr double kC8Seconds = 180.0;

constexpr int kOrliczPairs = 100;
constexpr double kHomogeneityTol = 1e-9;
constexpr double kTriangleSlack = 1e-9;

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body, double limit_seconds = 0.0) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit_seconds > 0.0 && dt > limit_seconds) {
    o.passed = false;
    o.detail += "; runtime over " + fmt("%.0f s", limit_seconds);
  }
  if (!o.passed) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", id, title, o.detail.c_str(), dt);
  std::fflush(stdout);
}

ModelProblem calibrated(std::string_view name) { return calibrate_cp(name, testing::builtin_sp(), kCpFactor); }

const SolveReport& power_solve() {
  static const SolveReport r = [] {
    SolverOptions opt;
    opt.tol = kSolveTol;
    return mountain_pass_solve(calibrated("power"), make_grid(Grid2D(kGridR, kGridN)), opt);
  }();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  run(
      1, "transform round-trip",
      [] {
        const TransformKernel k;
        double worst = 0.0;
        double worst_slope = 0.0;
        for (int i = 0; i < kRoundTripSamples; ++i) {
          const double u = -50.0 + 100.0 * i / (kRoundTripSamples - 1);
          worst = std::max(worst, std::abs(k.f_inverse(k.h_forward(u)) - u));
          const double fd = (k.h_forward(u + kSlopeStep) - k.h_forward(u - kSlopeStep)) / (2 * kSlopeStep);
          const double exact = std::sqrt(1.0 + u * u);
          worst_slope = std::max(worst_slope, std::abs(fd - exact) / exact);
        }
        return Outcome{worst <= kRoundTripTol && worst_slope <= kSlopeRelTol,
                       "max |f(h(u))-u| = " + fmt("%.2e", worst) + ", max h' rel err = " + fmt("%.2e", worst_slope)};
      },
      kC1Seconds);

  run(
      2, "functional identity J(f(v)) = J_bar(v)",
      [] {
        std::mt19937_64 rng(202);
        const GridPtr grid = make_grid(Grid2D(kGridR, 48));
        const TransformKernel k;
        double worst = 0.0;
        for (auto name : builtin_model_names()) {
          const DiscreteFunctional F(calibrated(name), grid);
          for (int i = 0; i < kIdentityFields; ++i) {
            const Field v = testing::random_smooth_field(grid, rng, 1.2, true, 0.05);
            Field u(grid);
            for (std::size_t n = 0; n < v.size(); ++n) u[n] = k.f_inverse(v[n]);
            const double jb = F.j_bar(v).total;
            worst = std::max(worst, std::abs(F.j(u) - jb) / (1.0 + std::abs(jb)));
          }
        }
        return Outcome{worst <= kIdentityTol, "max |J(f(v)) - J_bar(v)|/(1+|J_bar|) = " + fmt("%.2e", worst)};
      },
      kC2Seconds);

  run(
      3, "gradient vs central finite difference",
      [] {
        std::mt19937_64 rng(303);
        const GridPtr grid = make_grid(Grid2D(kGridR, 48));
        double worst = 0.0;
        for (auto name : builtin_model_names()) {
          const DiscreteFunctional F(calibrated(name), grid);
          for (int i = 0; i < kGradientPairs; ++i) {
            const Field v = testing::random_smooth_field(grid, rng, 0.8, true, 0.02);
            const Field phi = testing::random_smooth_field(grid, rng, 1.0, true, 0.1);
            const double exact = dot(F.gradient(v), phi);
            const double fd =
                (F.j_bar(v + kGradientStep * phi).total - F.j_bar(v - kGradientStep * phi).total) / (2 * kGradientStep);
            worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
          }
        }
        return Outcome{worst <= kGradientRelTol, "max relative error = " + fmt("%.2e", worst)};
      },
      kC3Seconds);

  run(
      4, "mountain-pass convergence and level bound",
      [] {
        const auto& r = power_solve();
        const bool ok = r.residual_max <= kSolveTol && r.energy > 0.0 && r.energy < 1.0 / 6.0;
        return Outcome{ok, "E = " + fmt("%.8f", r.energy) + ", residual = " + fmt("%.2e", r.residual_max) +
                               ", sweeps = " + std::to_string(r.iterations)};
      },
      kC4Seconds);

  run(5, "critical-point norm bound", [] {
    const auto& r = power_solve();
    const auto m = calibrated("power");
    const double K = DiscreteFunctional(m, r.solution.grid_ptr()).constraint_norm_sq(r.solution);
    const double cap = 2.0 * m.theta / (m.theta - 4.0) * r.energy * (1.0 + kNormBoundSlack);
    return Outcome{K <= cap, "K = " + fmt("%.6f", K) + " <= " + fmt("%.6f", cap)};
  });

  run(6, "mountain-pass geometry J_bar >= rho^2/8", [] {
    std::mt19937_64 rng(606);
    const GridPtr grid = make_grid(Grid2D(kGridR, 64));
    double worst = std::numeric_limits<double>::infinity();
    for (auto name : builtin_model_names()) {
      const DiscreteFunctional F(calibrated(name), grid);
      for (int i = 0; i < kGeometryDirections; ++i) {
        const Field w = testing::random_smooth_field(grid, rng, 1.0, true, 0.05);
        for (double rho : kGeometryRhos) {
          const Field v = scale_to_constraint(F, w, rho);
          worst = std::min(worst, F.j_bar(v).total / (rho * rho / 8.0) - 1.0);
        }
      }
    }
    return Outcome{worst >= 0.0, "min J_bar/(rho^2/8) - 1 = " + fmt("%.3e", worst)};
  });

  run(
      7, "S_p scale invariance, Gaussian bound, restart spread",
      [] {
        const auto m = builtin_model("power");
        const GridPtr grid = default_sp_grid();
        std::mt19937_64 rng(707);
        double worst_scale = 0.0;
        for (int i = 0; i < 10; ++i) {
          const Field u = testing::random_smooth_field(grid, rng, 1.0, false);
          const double q = sp_quotient(m, u);
          for (double c : kScaleFactors) worst_scale = std::max(worst_scale, std::abs(sp_quotient(m, c * u) - q) / q);
        }
        const SpResult sp = compute_sp(m, grid);
        double sweep = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kGaussianSweep; ++i) {
          const double s = 0.3 * std::pow(10.0, static_cast<double>(i) / (kGaussianSweep - 1));
          sweep = std::min(sweep, sp_quotient(m, Field::sample(grid, [s](Point x) {
                                                return std::exp(-(x.x1 * x.x1 + x.x2 * x.x2) / (s * s));
                                              })));
        }
        const bool ok = worst_scale <= kScaleInvarianceTol && sp.value <= sweep && sp.restarts_spread <= kSpreadTol;
        return Outcome{ok, "scale err = " + fmt("%.1e", worst_scale) + ", S_p = " + fmt("%.6f", sp.value) +
                               " <= sweep " + fmt("%.6f", sweep) + ", spread = " + fmt("%.1e", sp.restarts_spread)};
      },
      kC7Seconds);

  run(
      8, "oracle equivalence (constant V)",
      [] {
        const auto m = calibrated("constant_V_power");
        SolverOptions opt;
        opt.tol = kSolveTol;
        const SolveReport r = mountain_pass_solve(m, make_grid(Grid2D(kGridR, kGridN)), opt);
        const ShootingSolution s = find_ground_state_shooting(m);
        const double diff = compare_profiles(r.solution, s.profile);
        const double crit = max_abs(DiscreteFunctional(m, s.profile.grid_ptr()).gradient(s.profile));
        const bool ok = diff <= kProfileTol && crit <= kCriticalityFactor * kSolveTol;
        return Outcome{ok, "relative L2 difference = " + fmt("%.5f", diff) + ", criticality residual = " +
                               fmt("%.2e", crit)};
      },
      kC8Seconds);

  run(9, "Orlicz norm axioms", [] {
    std::mt19937_64 rng(909);
    const GridPtr grid = make_grid(Grid2D(kGridR, 24));
    const DiscreteFunctional F(calibrated("power"), grid);
    double worst_h = 0.0;
    double worst_t = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kOrliczPairs; ++i) {
      const Field v = testing::random_smooth_field(grid, rng, testing::uniform(rng, 0.01, 20.0), true, 0.1);
      const Field w = testing::random_smooth_field(grid, rng, testing::uniform(rng, 0.01, 20.0), true, 0.1);
      const double c = testing::uniform(rng, -10.0, 10.0);
      const double nv = F.orlicz_norm(v);
      worst_h = std::max(worst_h, std::abs(F.orlicz_norm(c * v) - std::abs(c) * nv) / (std::abs(c) * nv));
      worst_t = std::max(worst_t, F.orlicz_norm(v + w) - nv - F.orlicz_norm(w));
    }
    const bool ok = worst_h <= kHomogeneityTol && worst_t <= kTriangleSlack;
    return Outcome{ok, "homogeneity rel err = " + fmt("%.1e", worst_h) + ", worst triangle excess = " + fmt("%.1e", worst_t)};
  });

  run(10, "hypothesis auditor sensitivity", [] {
    const auto s_for = [](const ModelProblem& m) { return default_s_samples(m); };
    const auto x = default_x_samples();
    auto theta3 = builtin_model("power", {.theta = 3.0, .Cp = 10.0});
    const bool h4 = check_hypotheses(theta3, s_for(theta3), x).at("H4").status == HypothesisStatus::fail;
    auto linear = builtin_model("power", {.Cp = 10.0});
    linear.nonlinearity = [](Point, double s) { return s; };
    linear.primitive = [](Point, double s) { return 0.5 * s * s; };
    const bool h2 = check_hypotheses(linear, s_for(linear), x).at("H2").status == HypothesisStatus::fail;
    bool builtins = true;
    for (auto name : builtin_model_names()) {
      const auto m = calibrated(name);
      builtins = builtins && check_hypotheses(m, s_for(m), x, testing::builtin_sp()).passes_h1_to_h5();
    }
    return Outcome{h4 && h2 && builtins, std::string("theta=3 fails H4: ") + (h4 ? "yes" : "no") +
                                             ", g=s fails H2: " + (h2 ? "yes" : "no") +
                                             ", builtins pass H1-H5: " + (builtins ? "yes" : "no")};
  });

  run(11, "determinism of cmd_solve", [] {
    const fs::path base = fs::temp_directory_path() / "qlmp_acceptance_determinism";
    fs::remove_all(base);
    RunConfig a;
    a.output_dir = base / "a";
    RunConfig b = a;
    b.output_dir = base / "b";
    const int sa = cmd_solve(a);
    const int sb = cmd_solve(b);
    const std::string ra = slurp(a.output_dir / "report.json");
    const std::string rb = slurp(b.output_dir / "report.json");
    const bool ok = sa == kExitOk && sb == kExitOk && !ra.empty() && ra == rb;
    fs::remove_all(base);
    return Outcome{ok, "exit " + std::to_string(sa) + "/" + std::to_string(sb) + ", report.json " +
                           (ra == rb ? "byte-identical" : "differs") + " (" + std::to_string(ra.size()) + " bytes)"};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
