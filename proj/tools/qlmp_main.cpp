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

// Batch front-end: qlmp <solve|sp|check|oracle|verify-all> [--config PATH] [--out DIR] [--seed N]

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "qlmp/cli.hpp"
#include "qlmp/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mountain-pass solver and verification suite for a 2D quasilinear Schrodinger equation"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration file (key = value lines)");
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Random seed (overrides solver.seed)");
  };
  auto* solve = app.add_subcommand("solve", "Mountain-pass solve and verification checks");
  auto* sp = app.add_subcommand("sp", "Compute S_p and the Cp admissibility threshold");
  auto* check = app.add_subcommand("check", "Audit hypotheses H1-H6");
  auto* oracle = app.add_subcommand("oracle", "Radial shooting cross-check of a prior constant_V_power solve");
  auto* all = app.add_subcommand("verify-all", "Run sp, check, solve and oracle in order");
  for (auto* sub : {solve, sp, check, oracle, all}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qlmp::kExitValidation;
  }

  qlmp::RunConfig config;
  try {
    if (!config_path.empty()) config = qlmp::load_config(config_path);
  } catch (const qlmp::IoError& e) {
    std::cerr << e.what() << '\n';
    return qlmp::kExitIo;
  } catch (const qlmp::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return qlmp::kExitValidation;
  }
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (seed) config.solver_seed = *seed;

  if (solve->parsed()) return qlmp::cmd_solve(config);
  if (sp->parsed()) return qlmp::cmd_sp(config);
  if (check->parsed()) return qlmp::cmd_check(config);
  if (oracle->parsed()) return qlmp::cmd_oracle(config);
  return qlmp::cmd_verify_all(config);
}
