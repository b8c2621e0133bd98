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

#include "qlmp/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "qlmp/energy.hpp"
#include "qlmp/error.hpp"
#include "qlmp/model.hpp"
#include "qlmp/oracle.hpp"
#include "qlmp/solver.hpp"

namespace qlmp {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// ---------------------------------------------------------------- config

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(x)) {
    throw ValidationError("config: '" + key + "' expects a finite real, got '" + text + "'");
  }
  return x;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& text) {
  Int x{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("config: '" + key + "' expects an integer, got '" + text + "'");
  }
  return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw ValidationError("config: '" + key + "' expects a comma-separated list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"model.name", [](RunConfig& c, const std::string&, const std::string& v) { c.model_name = v; }},
      {"model.theta", [](RunConfig& c, const std::string& k, const std::string& v) { c.theta = parse_real(k, v); }},
      {"model.p", [](RunConfig& c, const std::string& k, const std::string& v) { c.p = parse_real(k, v); }},
      {"model.Cp",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "auto") {
           c.Cp.reset();
         } else {
           c.Cp = parse_real(k, v);
         }
       }},
      {"model.cp_factor", [](RunConfig& c, const std::string& k, const std::string& v) { c.cp_factor = parse_real(k, v); }},
      {"model.v_amplitude",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.v_amplitude = parse_real(k, v); }},
      {"grid.R", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_R = parse_real(k, v); }},
      {"grid.n", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_n = parse_integer<int>(k, v); }},
      {"grid.r_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_r_max = parse_real(k, v); }},
      {"grid.m", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_m = parse_integer<int>(k, v); }},
      {"solver.P", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver_P = parse_integer<int>(k, v); }},
      {"solver.tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver_tol = parse_real(k, v); }},
      {"solver.max_sweeps",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver_max_sweeps = parse_integer<int>(k, v); }},
      {"solver.seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.solver_seed = parse_integer<std::uint64_t>(k, v);
       }},
      {"solver.rho_scan",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver_rho_scan = parse_list(k, v); }},
      {"sp.restarts",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.sp_restarts = parse_integer<int>(k, v); }},
      {"oracle.r_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_r_max = parse_real(k, v); }},
      {"oracle.step", [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_step = parse_real(k, v); }},
      {"oracle.tol_v0",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_tol_v0 = parse_real(k, v); }},
      {"oracle.sweep_min",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_sweep_min = parse_real(k, v); }},
      {"oracle.sweep_max",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_sweep_max = parse_real(k, v); }},
      {"oracle.sweep_points",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_sweep_points = parse_integer<int>(k, v); }},
      {"oracle.m", [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_m = parse_integer<int>(k, v); }},
      {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string line;
  std::map<std::string, int> seen;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (seen[key]++) throw ValidationError("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    it->second(c, key, value);
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  const auto opt = [](const std::optional<double>& x, const char* fallback) {
    return x ? format_double(*x) : std::string(fallback);
  };
  o << "model.name = " << c.model_name << '\n';
  o << "model.theta = " << opt(c.theta, "6") << '\n';
  o << "model.p = " << opt(c.p, "6") << '\n';
  o << "model.Cp = " << opt(c.Cp, "auto") << '\n';
  o << "model.cp_factor = " << format_double(c.cp_factor) << '\n';
  o << "model.v_amplitude = " << opt(c.v_amplitude, "0.5") << '\n';
  o << "grid.R = " << format_double(c.grid_R) << '\n';
  o << "grid.n = " << c.grid_n << '\n';
  o << "grid.r_max = " << format_double(c.grid_r_max) << '\n';
  o << "grid.m = " << c.grid_m << '\n';
  o << "solver.P = " << c.solver_P << '\n';
  o << "solver.tol = " << format_double(c.solver_tol) << '\n';
  o << "solver.max_sweeps = " << c.solver_max_sweeps << '\n';
  o << "solver.seed = " << c.solver_seed << '\n';
  o << "solver.rho_scan = ";
  for (std::size_t i = 0; i < c.solver_rho_scan.size(); ++i) {
    o << (i ? ", " : "") << format_double(c.solver_rho_scan[i]);
  }
  o << '\n';
  o << "sp.restarts = " << c.sp_restarts << '\n';
  o << "oracle.r_max = " << format_double(c.oracle_r_max) << '\n';
  o << "oracle.step = " << format_double(c.oracle_step) << '\n';
  o << "oracle.tol_v0 = " << format_double(c.oracle_tol_v0) << '\n';
  o << "oracle.sweep_min = " << format_double(c.oracle_sweep_min) << '\n';
  o << "oracle.sweep_max = " << format_double(c.oracle_sweep_max) << '\n';
  o << "oracle.sweep_points = " << c.oracle_sweep_points << '\n';
  o << "oracle.m = " << c.oracle_m << '\n';
  o << "output.dir = " << c.output_dir.string() << '\n';
  return o.str();
}

void validate_config(const RunConfig& c) {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("config: " + what);
  };
  const auto names = builtin_model_names();
  require(std::find(names.begin(), names.end(), c.model_name) != names.end(),
          "model.name must be a builtin model, got '" + c.model_name + "'");
  if (c.p) require(*c.p > 2.0, "model.p must exceed 2");
  if (c.theta) require(*c.theta > 0.0, "model.theta must be positive");
  if (c.Cp) require(*c.Cp > 0.0, "model.Cp must be positive");
  if (c.v_amplitude) require(*c.v_amplitude >= 0.0, "model.v_amplitude must be nonnegative");
  require(c.cp_factor > 0.0, "model.cp_factor must be positive");
  require(c.grid_R > 0.0, "grid.R must be positive");
  require(c.grid_n >= 3, "grid.n must be at least 3");
  require(c.grid_r_max > 0.0, "grid.r_max must be positive");
  require(c.grid_m >= 3, "grid.m must be at least 3");
  require(c.solver_P >= 3, "solver.P must be at least 3");
  require(c.solver_tol > 0.0, "solver.tol must be positive");
  require(c.solver_max_sweeps >= 1, "solver.max_sweeps must be positive");
  require(!c.solver_rho_scan.empty(), "solver.rho_scan must not be empty");
  for (double r : c.solver_rho_scan) require(r > 0.0, "solver.rho_scan entries must be positive");
  require(c.sp_restarts >= 1, "sp.restarts must be at least 1");
  require(c.oracle_r_max > 0.0, "oracle.r_max must be positive");
  require(c.oracle_step > 0.0 && c.oracle_step < c.oracle_r_max, "oracle.step must lie in (0, oracle.r_max)");
  require(c.oracle_tol_v0 > 0.0, "oracle.tol_v0 must be positive");
  require(c.oracle_sweep_min > 0.0 && c.oracle_sweep_max > c.oracle_sweep_min, "oracle sweep range is invalid");
  require(c.oracle_sweep_points >= 2, "oracle.sweep_points must be at least 2");
  require(c.oracle_m >= 3, "oracle.m must be at least 3");
  require(!c.output_dir.empty(), "output.dir must not be empty");
}

namespace {

// ---------------------------------------------------------------- output

void write_json_value(std::ostream& o, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        o << "{}";
        return;
      }
      o << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) o << ",\n";
        first = false;
        o << pad_in << Json(k).dump() << ": ";
        write_json_value(o, v, indent + 1);
      }
      o << '\n' << pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        o << "[]";
        return;
      }
      o << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) o << ", ";
        first = false;
        write_json_value(o, v, indent + 1);
      }
      o << ']';
      return;
    }
    case Json::value_t::number_float:
      o << format_double(j.get<double>());
      return;
    default:
      o << j.dump();
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const Json& j) {
  std::ostringstream o;
  write_json_value(o, j, 0);
  o << '\n';
  write_text(path, o.str());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

// ---------------------------------------------------------------- model

ModelOverrides overrides_of(const RunConfig& c) {
  ModelOverrides o;
  o.theta = c.theta;
  o.p = c.p;
  o.Cp = c.Cp;
  o.v_amplitude = c.v_amplitude;
  return o;
}

struct ResolvedModel {
  ModelProblem model;
  std::string cp_source;
  std::optional<double> sp_value;
};

SpOptions sp_options(const RunConfig& c) {
  SpOptions o;
  o.restarts = c.sp_restarts;
  o.seed = c.solver_seed;
  return o;
}

GridPtr sp_grid(const RunConfig& c) { return make_grid(RadialGrid(c.grid_r_max, c.grid_m)); }

ResolvedModel resolve_model(const RunConfig& c) {
  ModelOverrides ov = overrides_of(c);
  ModelProblem base = builtin_model(c.model_name, ov);
  if (c.Cp) return {base, "config", std::nullopt};
  const SpResult sp = compute_sp(base, sp_grid(c), sp_options(c));
  try {
    return {calibrate_cp(c.model_name, sp.value, c.cp_factor, ov), "auto", sp.value};
  } catch (const DomainError&) {
    // theta <= 4 or p <= 2: no threshold; keep the builtin constant.
    return {base, "builtin (threshold undefined)", sp.value};
  }
}

RunConfig resolved_config(RunConfig c, const ModelProblem& m) {
  c.theta = m.theta;
  c.p = m.p;
  c.Cp = m.Cp;
  c.v_amplitude = m.v_amplitude;
  return c;
}

Json model_json(const ModelProblem& m, const std::string& cp_source) {
  Json j;
  j["name"] = m.name;
  j["theta"] = m.theta;
  j["p"] = m.p;
  j["Cp"] = m.Cp;
  j["Cp_source"] = cp_source;
  j["V0"] = m.V0;
  j["V1"] = m.V1;
  j["v_amplitude"] = m.v_amplitude;
  return j;
}

Json breakdown_json(const EnergyBreakdown& e) {
  Json j;
  j["kinetic"] = e.kinetic;
  j["potential"] = e.potential;
  j["nonlinear"] = e.nonlinear;
  j["total"] = e.total;
  return j;
}

Json checks_json(const BoundChecks& checks) {
  Json j = Json::object();
  for (const auto& [name, c] : checks) {
    Json e;
    e["passed"] = c.passed;
    e["margin"] = c.margin;
    e["gating"] = c.gating;
    e["detail"] = c.detail;
    j[name] = e;
  }
  return j;
}

bool gating_checks_pass(const BoundChecks& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return !kv.second.gating || kv.second.passed; });
}

std::string solution_csv(const Field& v) {
  const TransformKernel kernel;
  std::string out = "x1,x2,v,u\n";
  out.reserve(v.size() * 90);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point x = node_position(v.grid(), k);
    out += format_double(x.x1) + ',' + format_double(x.x2) + ',' + format_double(v[k]) + ',' +
           format_double(kernel.f_inverse(v[k])) + '\n';
  }
  return out;
}

std::string history_csv(const std::vector<HistoryEntry>& history) {
  std::string out = "iteration,energy,residual\n";
  for (const auto& h : history) {
    out += std::to_string(h.iteration) + ',' + format_double(h.energy) + ',' + format_double(h.residual) + '\n';
  }
  return out;
}

Json report_json(const SolveReport& r, bool converged) {
  Json j;
  j["converged"] = converged;
  j["energy"] = r.energy;
  j["breakdown"] = breakdown_json(r.breakdown);
  j["residual_max"] = r.residual_max;
  j["residual_l2"] = r.residual_l2;
  j["iterations"] = r.iterations;
  j["min_value"] = r.min_value;
  j["h1L_norm"] = r.h1l_norm;
  j["bound_checks"] = checks_json(r.bound_checks);
  j["all_checks_passed"] = converged && gating_checks_pass(r.bound_checks);
  return j;
}

template <class Fn>
int guarded(const char* command, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const LookupError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitNonConvergence;
  }
}

HypothesisReport audit(const ModelProblem& model, std::optional<double> sp) {
  const auto s = default_s_samples(model);
  const auto x = default_x_samples();
  return check_hypotheses(model, s, x, sp);
}

Json hypotheses_json(const HypothesisReport& rep) {
  Json arr = Json::array();
  for (const auto& e : rep.entries) {
    Json j;
    j["id"] = e.id;
    j["status"] = std::string(to_string(e.status));
    j["worst_violation"] = e.worst_violation;
    j["worst_x"] = Json::array({e.worst_x.x1, e.worst_x.x2});
    j["worst_s"] = e.worst_s;
    j["untestable_samples"] = e.untestable_samples;
    j["detail"] = e.detail;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace

// ---------------------------------------------------------------- commands

int cmd_solve(const RunConfig& config) {
  return guarded("solve", [&] {
    validate_config(config);
    const fs::path dir = config.output_dir;
    prepare_output(dir);
    const ResolvedModel rm = resolve_model(config);
    write_text(dir / "manifest.cfg", serialize_config(resolved_config(config, rm.model)));

    Json j;
    j["command"] = "solve";
    j["model"] = model_json(rm.model, rm.cp_source);
    Json g;
    g["R"] = config.grid_R;
    g["n"] = config.grid_n;
    j["grid"] = g;

    const HypothesisReport hyp = audit(rm.model, rm.sp_value);
    j["hypotheses_h1_h5"] = hyp.passes_h1_to_h5();
    if (!hyp.passes_h1_to_h5()) {
      j["converged"] = false;
      j["all_checks_passed"] = false;
      write_json(dir / "report.json", j);
      std::cerr << "solve: model fails H1-H5; see check\n";
      return static_cast<int>(kExitChecksFailed);
    }

    SolverOptions opt;
    opt.path_nodes = config.solver_P;
    opt.tol = config.solver_tol;
    opt.max_sweeps = config.solver_max_sweeps;
    opt.seed = config.solver_seed;
    opt.rho_scan = config.solver_rho_scan;
    const GridPtr grid = make_grid(Grid2D(config.grid_R, config.grid_n));

    const auto persist = [&](const SolveReport& r, bool converged) {
      const Json body = report_json(r, converged);
      for (const auto& [k, v] : body.items()) j[k] = v;
      write_json(dir / "report.json", j);
      write_text(dir / "solution.csv", solution_csv(r.solution));
      write_text(dir / "history.csv", history_csv(r.history));
    };
    try {
      const SolveReport r = mountain_pass_solve(rm.model, grid, opt);
      persist(r, true);
      const bool ok = gating_checks_pass(r.bound_checks);
      std::cout << "solve: energy " << format_double(r.energy) << " residual " << format_double(r.residual_max)
                << " sweeps " << r.iterations << (ok ? " checks passed" : " checks FAILED") << '\n';
      return static_cast<int>(ok ? kExitOk : kExitChecksFailed);
    } catch (const NonConvergenceError& e) {
      persist(e.best(), false);
      std::cerr << "solve: " << e.what() << '\n';
      return static_cast<int>(kExitNonConvergence);
    } catch (const StepSizeError& e) {
      persist(e.best(), false);
      std::cerr << "solve: " << e.what() << '\n';
      return static_cast<int>(kExitNonConvergence);
    }
  });
}

int cmd_sp(const RunConfig& config) {
  return guarded("sp", [&] {
    validate_config(config);
    const fs::path dir = config.output_dir;
    prepare_output(dir);
    ModelOverrides ov = overrides_of(config);
    const ModelProblem base = builtin_model(config.model_name, ov);
    const SpResult sp = compute_sp(base, sp_grid(config), sp_options(config));
    const double threshold = cp_threshold(base.theta, base.p, sp.value);
    const double cp = config.Cp ? *config.Cp : config.cp_factor * threshold;
    write_text(dir / "manifest.cfg", serialize_config(config));

    Json j;
    j["command"] = "sp";
    j["model"] = config.model_name;
    j["theta"] = base.theta;
    j["p"] = base.p;
    j["V1"] = base.V1;
    j["S_p"] = sp.value;
    j["restarts_spread"] = sp.restarts_spread;
    j["restart_values"] = sp.restart_values;
    j["threshold"] = threshold;
    j["Cp"] = cp;
    j["Cp_source"] = config.Cp ? "config" : "auto";
    j["H6_margin"] = cp > threshold;
    Json g;
    g["r_max"] = config.grid_r_max;
    g["m"] = config.grid_m;
    j["grid"] = g;
    write_json(dir / "sp.json", j);

    std::string csv = "r,u\n";
    const auto& rg = std::get<RadialGrid>(sp.minimizer.grid());
    for (std::size_t i = 0; i < sp.minimizer.size(); ++i) {
      csv += format_double(rg.radius(i)) + ',' + format_double(sp.minimizer[i]) + '\n';
    }
    write_text(dir / "sp_minimizer.csv", csv);

    const bool ok = sp.restarts_spread <= 0.01 && cp > threshold;
    std::cout << "sp: S_p " << format_double(sp.value) << " spread " << format_double(sp.restarts_spread)
              << " threshold " << format_double(threshold) << (cp > threshold ? "" : " (Cp below threshold)") << '\n';
    return static_cast<int>(ok ? kExitOk : kExitChecksFailed);
  });
}

int cmd_check(const RunConfig& config) {
  return guarded("check", [&] {
    validate_config(config);
    const fs::path dir = config.output_dir;
    prepare_output(dir);
    const ResolvedModel rm = resolve_model(config);
    std::optional<double> sp;
    Json j;
    j["command"] = "check";
    j["model"] = model_json(rm.model, rm.cp_source);
    const fs::path sp_path = dir / "sp.json";
    if (fs::exists(sp_path)) {
      const Json s = read_json(sp_path);
      if (!s.contains("S_p") || !s["S_p"].is_number()) throw IoError("sp.json lacks a numeric S_p");
      sp = s["S_p"].get<double>();
      j["sp_source"] = sp_path.string();
    } else {
      j["sp_source"] = nullptr;
    }
    const HypothesisReport rep = audit(rm.model, sp);
    j["hypotheses"] = hypotheses_json(rep);
    j["h1_to_h5_passed"] = rep.passes_h1_to_h5();
    write_json(dir / "hypotheses.json", j);
    std::cout << "check:";
    for (const auto& e : rep.entries) std::cout << ' ' << e.id << '=' << to_string(e.status);
    std::cout << '\n';
    return static_cast<int>(rep.passes_h1_to_h5() ? kExitOk : kExitChecksFailed);
  });
}

int cmd_oracle(const RunConfig& config) {
  return guarded("oracle", [&] {
    validate_config(config);
    const fs::path dir = config.output_dir;
    const fs::path manifest_path = dir / "manifest.cfg";
    const fs::path solution_path = dir / "solution.csv";
    const fs::path report_path = dir / "report.json";
    if (!fs::exists(manifest_path) || !fs::exists(solution_path) || !fs::exists(report_path)) {
      throw ValidationError("no prior solve in " + dir.string());
    }
    const RunConfig solved = load_config(manifest_path);
    if (solved.model_name != "constant_V_power") {
      throw ValidationError("prior solve used model '" + solved.model_name + "'; the oracle needs constant_V_power");
    }
    const Json prior = read_json(report_path);
    if (!prior.value("converged", false)) throw ValidationError("prior solve did not converge");
    const ModelProblem model = builtin_model(solved.model_name, overrides_of(solved));

    // Rebuild the 2D solution from its CSV.
    const GridPtr grid = make_grid(Grid2D(solved.grid_R, solved.grid_n));
    std::ifstream in(solution_path);
    if (!in) throw IoError("cannot read " + solution_path.string());
    std::string line;
    std::getline(in, line);
    if (trim(line) != "x1,x2,v,u") throw IoError("unexpected header in solution.csv");
    std::vector<double> values;
    values.reserve(node_count(*grid));
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      std::stringstream ls(line);
      std::string cell;
      for (int c = 0; c < 3; ++c) std::getline(ls, cell, ',');
      values.push_back(parse_real("solution.csv v", trim(cell)));
    }
    if (values.size() != node_count(*grid)) throw IoError("solution.csv does not match the solve grid");
    const Field v2d(grid, std::move(values));

    ShootingOptions so;
    so.r_max = config.oracle_r_max;
    so.step = config.oracle_step;
    so.tol_v0 = config.oracle_tol_v0;
    so.sweep_min = config.oracle_sweep_min;
    so.sweep_max = config.oracle_sweep_max;
    so.sweep_points = config.oracle_sweep_points;
    so.m = config.oracle_m;
    const ShootingSolution sol = find_ground_state_shooting(model, so);

    const double diff = compare_profiles(v2d, sol.profile);
    const DiscreteFunctional radial(model, sol.profile.grid_ptr());
    const double crit = max_abs(radial.gradient(sol.profile));
    const double crit_limit = 10.0 * solved.solver_tol;
    const double radial_energy = radial.j_bar(sol.profile).total;
    const double solve_energy = prior.value("energy", 0.0);
    const double energy_gap = std::abs(radial_energy - solve_energy) / std::abs(solve_energy);

    Json j;
    j["command"] = "oracle";
    j["model"] = model_json(model, "manifest");
    j["v0"] = sol.v0;
    j["bracket"] = Json::array({sol.bracket_low, sol.bracket_high});
    j["bisection_steps"] = sol.bisection_widths.size() - 1;
    j["relative_l2_difference"] = diff;
    j["difference_limit"] = 0.02;
    j["criticality_residual"] = crit;
    j["criticality_limit"] = crit_limit;
    j["radial_energy"] = radial_energy;
    j["solve_energy"] = solve_energy;
    j["energy_relative_gap"] = energy_gap;
    j["energy_gap_limit"] = 0.05;
    const bool ok = diff <= 0.02 && crit <= crit_limit && energy_gap <= 0.05;
    j["passed"] = ok;
    write_json(dir / "oracle.json", j);

    std::string csv = "r,v,u\n";
    const TransformKernel kernel;
    const auto& rg = std::get<RadialGrid>(sol.profile.grid());
    for (std::size_t i = 0; i < sol.profile.size(); ++i) {
      csv += format_double(rg.radius(i)) + ',' + format_double(sol.profile[i]) + ',' +
             format_double(kernel.f_inverse(sol.profile[i])) + '\n';
    }
    write_text(dir / "oracle_profile.csv", csv);
    std::cout << "oracle: difference " << format_double(diff) << " criticality " << format_double(crit)
              << (ok ? " passed" : " FAILED") << '\n';
    return static_cast<int>(ok ? kExitOk : kExitChecksFailed);
  });
}

int cmd_verify_all(const RunConfig& config) {
  return guarded("verify-all", [&] {
    validate_config(config);
    prepare_output(config.output_dir);
    std::vector<std::pair<std::string, int>> steps;
    steps.emplace_back("sp", cmd_sp(config));
    steps.emplace_back("check", cmd_check(config));
    steps.emplace_back("solve", cmd_solve(config));
    if (config.model_name == "constant_V_power") {
      steps.emplace_back("oracle", cmd_oracle(config));
    } else {
      RunConfig oc = config;
      oc.model_name = "constant_V_power";
      oc.output_dir = config.output_dir / "oracle";
      steps.emplace_back("oracle_solve", cmd_solve(oc));
      steps.emplace_back("oracle", cmd_oracle(oc));
    }
    Json j;
    j["command"] = "verify-all";
    int status = kExitOk;
    const auto rank = [](int s) {
      switch (s) {
        case kExitValidation:
          return 4;
        case kExitIo:
          return 3;
        case kExitNonConvergence:
          return 2;
        case kExitChecksFailed:
          return 1;
        default:
          return 0;
      }
    };
    Json arr = Json::array();
    for (const auto& [name, s] : steps) {
      Json e;
      e["step"] = name;
      e["exit_status"] = s;
      arr.push_back(e);
      if (rank(s) > rank(status)) status = s;
    }
    j["steps"] = arr;
    j["exit_status"] = status;
    write_json(config.output_dir / "verify_all.json", j);
    return status;
  });
}

}  // namespace qlmp
