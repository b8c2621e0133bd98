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

#include "qlmp/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qlmp/error.hpp"

namespace qlmp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCriticalRate = 4.0 * kPi;

constexpr std::array<std::string_view, 3> kBuiltinNames = {"power", "critical", "constant_V_power"};

// |s|^e for e >= 0 with a multiplication fast path for small integral e.
double abs_pow(double s, double e) {
  const double a = std::abs(s);
  const double rounded = std::round(e);
  if (rounded == e && e >= 0.0 && e <= 16.0) {
    double r = 1.0;
    for (int k = 0; k < static_cast<int>(e); ++k) r *= a;
    return r;
  }
  return std::pow(a, e);
}

double clamped_expm1(double exponent) { return std::expm1(std::min(exponent, 700.0)); }

// (e^a - 1 - a) without cancellation for small a.
double expm1_minus_linear(double a) {
  if (a < 1e-3) {
    return a * a * (0.5 + a * (1.0 / 6.0 + a * (1.0 / 24.0 + a / 120.0)));
  }
  return clamped_expm1(a) - a;
}

void validate_constants(double theta, double p, double Cp, double amplitude) {
  if (!std::isfinite(theta) || !std::isfinite(p) || !std::isfinite(Cp) || !std::isfinite(amplitude)) {
    throw DomainError("builtin_model: non-finite constant");
  }
  if (!(p > 2.0)) throw DomainError("builtin_model: p must exceed 2");
  if (!(Cp > 0.0)) throw DomainError("builtin_model: Cp must be positive");
  if (!(amplitude >= 0.0)) throw DomainError("builtin_model: V amplitude must be nonnegative");
}

struct Tracker {
  HypothesisResult result;
  bool any = false;

  void observe(double violation, Point x, double s) {
    if (!any || violation > result.worst_violation) {
      result.worst_violation = violation;
      result.worst_x = x;
      result.worst_s = s;
      any = true;
    }
  }
};

Point shifted(Point x, int axis) { return axis == 0 ? Point{x.x1 + 1.0, x.x2} : Point{x.x1, x.x2 + 1.0}; }

}  // namespace

double ModelProblem::safe_amplitude(double exp_guard) const {
  if (growth_rate <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(exp_guard / growth_rate, 0.25);
}

std::span<const std::string_view> builtin_model_names() { return kBuiltinNames; }

ModelProblem builtin_model(std::string_view name, const ModelOverrides& overrides) {
  const bool known = std::find(kBuiltinNames.begin(), kBuiltinNames.end(), name) != kBuiltinNames.end();
  if (!known) throw LookupError("unknown builtin model: " + std::string(name));

  ModelProblem m;
  m.name = std::string(name);
  m.theta = overrides.theta.value_or(6.0);
  m.p = overrides.p.value_or(6.0);
  m.Cp = overrides.Cp.value_or(1.0);
  m.v_amplitude = overrides.v_amplitude.value_or(0.5);
  validate_constants(m.theta, m.p, m.Cp, m.v_amplitude);

  const double amp = m.v_amplitude;
  m.V0 = 1.0;
  m.V1 = 1.0 + 2.0 * amp;
  if (name == "constant_V_power") {
    const double level = m.V1;
    m.V0 = level;
    m.constant_potential = true;
    m.potential = [level](Point) { return level; };
  } else {
    m.potential = [amp](Point x) {
      const double a = std::sin(kPi * x.x1);
      const double b = std::sin(kPi * x.x2);
      return 1.0 + amp * (a * a + b * b);
    };
  }

  const double Cp = m.Cp;
  const double p = m.p;
  if (name == "critical") {
    m.growth_rate = kCriticalRate;
    m.nonlinearity = [Cp, p](Point, double s) {
      const double s2 = s * s;
      const double power = Cp * abs_pow(s, p - 1.0);
      return std::copysign(power, s) + s * s2 * clamped_expm1(kCriticalRate * s2 * s2);
    };
    m.primitive = [Cp, p](Point, double s) {
      const double s2 = s * s;
      return Cp * abs_pow(s, p) / p + expm1_minus_linear(kCriticalRate * s2 * s2) / (4.0 * kCriticalRate);
    };
  } else {
    m.nonlinearity = [Cp, p](Point, double s) { return std::copysign(Cp * abs_pow(s, p - 1.0), s); };
    m.primitive = [Cp, p](Point, double s) { return Cp * abs_pow(s, p) / p; };
  }
  return m;
}

double cp_threshold(double theta, double p, double sp_value) {
  if (!(theta > 4.0)) throw DomainError("cp_threshold: theta must exceed 4");
  if (!(p > 2.0)) throw DomainError("cp_threshold: p must exceed 2");
  if (!(sp_value >= 0.0)) throw DomainError("cp_threshold: S_p must be nonnegative");
  const double base = theta * (p - 2.0) / (p * (theta - 4.0));
  return std::pow(base, 0.5 * (p - 2.0)) * std::pow(sp_value, p);
}

std::string_view to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::pass: return "pass";
    case HypothesisStatus::fail: return "fail";
    case HypothesisStatus::skipped: return "skipped";
  }
  return "unknown";
}

const HypothesisResult& HypothesisReport::at(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw LookupError("no hypothesis entry " + std::string(id));
}

bool HypothesisReport::passes_h1_to_h5() const {
  for (std::string_view id : {"H1", "H2", "H3", "H4", "H5"}) {
    if (at(id).status != HypothesisStatus::pass) return false;
  }
  return true;
}

HypothesisReport check_hypotheses(const ModelProblem& model, std::span<const double> s_samples,
                                  std::span<const Point> x_samples, std::optional<double> sp_value,
                                  const HypothesisOptions& options) {
  const auto& V = model.potential;
  const auto& g = model.nonlinearity;
  const auto& G = model.primitive;
  const double s_safe = model.safe_amplitude(options.exp_guard);
  auto testable = [&](double s) { return s <= s_safe; };
  std::size_t overflow = 0;
  for (double s : s_samples) {
    if (!testable(s)) ++overflow;
  }

  HypothesisReport report;

  // H1: V >= V0 > 0, V <= V1, unit periodicity.
  {
    Tracker t;
    t.result.id = "H1";
    t.observe(-model.V0, {}, 0.0);
    for (Point x : x_samples) {
      const double vx = V(x);
      t.observe(model.V0 - vx, x, 0.0);
      t.observe(vx - model.V1 - options.periodicity_tol, x, 0.0);
      for (int axis = 0; axis < 2; ++axis) {
        t.observe(std::abs(V(shifted(x, axis)) - vx) - options.periodicity_tol, x, 0.0);
      }
    }
    t.result.status = t.result.worst_violation <= 0.0 ? HypothesisStatus::pass : HypothesisStatus::fail;
    report.entries.push_back(t.result);
  }

  // H2: g, G >= 0, periodic in x, g(x,s)/s below the envelope for small s.
  {
    Tracker t;
    t.result.id = "H2";
    for (Point x : x_samples) {
      for (double s : s_samples) {
        if (!testable(s)) continue;
        const double gs = g(x, s);
        t.observe(-gs, x, s);
        t.observe(-G(x, s), x, s);
        for (int axis = 0; axis < 2; ++axis) {
          t.observe(std::abs(g(shifted(x, axis), s) - gs) - options.periodicity_tol * (1.0 + std::abs(gs)), x, s);
        }
        if (s <= options.h2_s_max) t.observe(gs / s - options.h2_envelope, x, s);
      }
      t.observe(std::abs(g(x, 0.0)), x, 0.0);
      t.observe(std::abs(G(x, 0.0)), x, 0.0);
    }
    t.result.status = t.result.worst_violation <= 0.0 ? HypothesisStatus::pass : HypothesisStatus::fail;
    t.result.untestable_samples = overflow;
    report.entries.push_back(t.result);
  }

  // H3: g <= C (e^{4 pi s^4} - 1). A finite C over the exponent-safe range
  // plus a growth-rate test on the upper quarter of that range.
  {
    Tracker t;
    t.result.id = "H3";
    double c_fit = 0.0;
    const double h3_limit = std::pow(options.exp_guard / kCriticalRate, 0.25);
    std::vector<double> upper;
    std::size_t h3_untestable = 0;
    for (double s : s_samples) {
      if (testable(s) && s <= h3_limit) {
        upper.push_back(s);
      } else {
        ++h3_untestable;
      }
    }
    bool finite = true;
    for (Point x : x_samples) {
      for (double s : upper) {
        const double ratio = g(x, s) / std::expm1(kCriticalRate * s * s * s * s);
        if (!std::isfinite(ratio)) finite = false;
        c_fit = std::max(c_fit, ratio);
      }
      if (upper.size() >= 4) {
        const double s_a = upper[upper.size() - upper.size() / 4 - 1];
        const double s_b = upper.back();
        auto log_ratio = [&](double s) {
          return std::log(g(x, s)) - std::log(std::expm1(kCriticalRate * s * s * s * s));
        };
        const double slope =
            (log_ratio(s_b) - log_ratio(s_a)) / (kCriticalRate * (std::pow(s_b, 4) - std::pow(s_a, 4)));
        t.observe(slope - options.growth_slope_tol, x, s_b);
      }
    }
    if (!finite) t.observe(std::numeric_limits<double>::infinity(), {}, 0.0);
    std::ostringstream os;
    os.precision(17);
    os << "fitted C = " << c_fit;
    t.result.detail = os.str();
    t.result.untestable_samples = h3_untestable;
    t.result.status = (t.any && t.result.worst_violation <= 0.0) ? HypothesisStatus::pass : HypothesisStatus::fail;
    report.entries.push_back(t.result);
  }

  // H4: theta > 4 and 0 <= theta G <= s g, with G checked against quadrature of g.
  {
    Tracker t;
    t.result.id = "H4";
    t.observe(4.0 - model.theta, {}, 0.0);
    if (!(model.theta > 4.0)) t.result.detail = "theta must exceed 4";
    double worst_quadrature = 0.0;
    const std::size_t x_stride = std::max<std::size_t>(1, x_samples.size() / 8);
    for (std::size_t xi = 0; xi < x_samples.size(); ++xi) {
      const Point x = x_samples[xi];
      for (double s : s_samples) {
        if (!testable(s)) continue;
        const double Gs = G(x, s);
        const double sg = s * g(x, s);
        t.observe(-model.theta * Gs, x, s);
        t.observe(model.theta * Gs - sg - 1e-12 * (1.0 + std::abs(sg)), x, s);
        if (xi % x_stride == 0) {
          const double quad = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
              [&](double r) { return g(x, r); }, 0.0, s, 8, 1e-11);
          const double err = std::abs(Gs - quad) / (1.0 + std::abs(Gs));
          worst_quadrature = std::max(worst_quadrature, err);
          t.observe(err - options.primitive_rel_tol, x, s);
        }
      }
    }
    if (t.result.detail.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "primitive vs quadrature max rel err = " << worst_quadrature;
      t.result.detail = os.str();
    }
    t.result.untestable_samples = overflow;
    t.result.status = t.result.worst_violation <= 0.0 ? HypothesisStatus::pass : HypothesisStatus::fail;
    report.entries.push_back(t.result);
  }

  // H5: g(x,s)/s nondecreasing.
  {
    Tracker t;
    t.result.id = "H5";
    for (Point x : x_samples) {
      double prev = -std::numeric_limits<double>::infinity();
      for (double s : s_samples) {
        if (!testable(s)) continue;
        const double q = g(x, s) / s;
        if (std::isfinite(prev)) t.observe(prev - q - 1e-12, x, s);
        prev = q;
      }
    }
    t.result.untestable_samples = overflow;
    t.result.status = (t.any && t.result.worst_violation <= 0.0) ? HypothesisStatus::pass : HypothesisStatus::fail;
    report.entries.push_back(t.result);
  }

  // H6: p > 2, g >= Cp s^{p-1}, and Cp above the S_p threshold when S_p is known.
  {
    Tracker t;
    t.result.id = "H6";
    t.observe(2.0 - model.p, {}, 0.0);
    for (Point x : x_samples) {
      for (double s : s_samples) {
        if (!testable(s)) continue;
        const double gs = g(x, s);
        t.observe(model.Cp * abs_pow(s, model.p - 1.0) - gs - 1e-12 * (1.0 + std::abs(gs)), x, s);
      }
    }
    const bool pointwise_ok = t.result.worst_violation <= 0.0;
    std::ostringstream os;
    os.precision(17);
    if (!sp_value.has_value()) {
      t.result.status = pointwise_ok ? HypothesisStatus::skipped : HypothesisStatus::fail;
      os << "S_p unavailable; threshold condition not evaluated";
    } else {
      try {
        const double threshold = cp_threshold(model.theta, model.p, *sp_value);
        t.observe(threshold - model.Cp, {}, 0.0);
        os << "threshold = " << threshold << ", Cp = " << model.Cp;
        t.result.status = t.result.worst_violation < 0.0 ? HypothesisStatus::pass : HypothesisStatus::fail;
      } catch (const DomainError& e) {
        os << e.what();
        t.result.status = HypothesisStatus::fail;
      }
    }
    t.result.detail = os.str();
    t.result.untestable_samples = overflow;
    report.entries.push_back(t.result);
  }

  return report;
}

std::vector<double> default_s_samples(const ModelProblem& model, double exp_guard, std::size_t count) {
  const double hi = std::min(5.0, 0.999 * model.safe_amplitude(exp_guard));
  const double lo = 1e-6;
  std::vector<double> s(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = count == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    s[k] = lo * std::pow(hi / lo, t);
  }
  return s;
}

std::vector<Point> default_x_samples(std::size_t per_axis) {
  std::vector<Point> xs;
  for (std::size_t i = 0; i < per_axis; ++i) {
    for (std::size_t j = 0; j < per_axis; ++j) {
      xs.push_back({static_cast<double>(i) / static_cast<double>(per_axis),
                    static_cast<double>(j) / static_cast<double>(per_axis)});
    }
  }
  // Golden-ratio offsets probe off the lattice and outside the unit cell.
  constexpr double phi = 0.6180339887498949;
  for (int k = 1; k <= 8; ++k) {
    xs.push_back({std::fmod(k * phi, 1.0) * 3.0 - 1.0, std::fmod(k * phi * phi, 1.0) * 3.0 - 1.0});
  }
  return xs;
}

}  // namespace qlmp
