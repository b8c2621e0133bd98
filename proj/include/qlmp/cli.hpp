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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qlmp {

/// Process exit statuses shared by every subcommand.
enum ExitStatus : int {
  kExitOk = 0,
  kExitNonConvergence = 1,
  kExitChecksFailed = 2,
  kExitIo = 3,
  kExitValidation = 4,
};

/// Fully resolved run configuration. Cp is either a number or calibrated
/// from S_p ("auto") as cp_factor times the admissibility threshold.
struct RunConfig {
  std::string model_name = "power";
  std::optional<double> theta;
  std::optional<double> p;
  std::optional<double> Cp;  // empty means auto
  double cp_factor = 1.5;
  std::optional<double> v_amplitude;

  double grid_R = 6.0;
  int grid_n = 128;
  double grid_r_max = 8.0;
  int grid_m = 800;

  int solver_P = 21;
  double solver_tol = 1e-5;
  int solver_max_sweeps = 50'000;
  std::uint64_t solver_seed = 20260101;
  std::vector<double> solver_rho_scan{1e-3, 1e-2, 1e-1};

  int sp_restarts = 4;

  double oracle_r_max = 6.0;
  double oracle_step = 1e-3;
  double oracle_tol_v0 = 1e-13;
  double oracle_sweep_min = 1e-4;
  double oracle_sweep_max = 1e2;
  int oracle_sweep_points = 61;
  int oracle_m = 600;

  std::filesystem::path output_dir = "run";
};

/// Parses "key = value" lines with dotted keys; '#' starts a comment.
/// Unknown or repeated keys and malformed values throw ValidationError.
[[nodiscard]] RunConfig parse_config(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in a fixed order; parse_config()
/// reads it back to an identical configuration.
[[nodiscard]] std::string serialize_config(const RunConfig& config);

/// Checks every numeric precondition; throws ValidationError.
void validate_config(const RunConfig& config);

/// %.17g, with non-finite values spelled as JSON strings.
[[nodiscard]] std::string format_double(double x);

[[nodiscard]] int cmd_solve(const RunConfig& config);
[[nodiscard]] int cmd_sp(const RunConfig& config);
[[nodiscard]] int cmd_check(const RunConfig& config);
[[nodiscard]] int cmd_oracle(const RunConfig& config);
/// sp, check, solve and oracle in that order; the oracle gets its own
/// constant_V_power solve under <out>/oracle unless the model already is one.
[[nodiscard]] int cmd_verify_all(const RunConfig& config);

}  // namespace qlmp
