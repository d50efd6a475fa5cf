/*
 * Copyright 2026 The byzlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// byzlab command line: run presets, emit plot tables, inspect configs.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 runtime error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "byzlab/config.hpp"
#include "byzlab/error.hpp"
#include "byzlab/experiment.hpp"
#include "byzlab/presets.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

using byzlab::cli::ExperimentConfig;

int run_command(const std::string& preset, std::optional<std::uint64_t> seed, std::string out,
                const std::string& config_path) {
  ExperimentConfig config = config_path.empty() ? byzlab::cli::preset_defaults(preset)
                                                : byzlab::cli::parse_config(config_path, preset);
  if (seed) config.seed = *seed;
  if (out.empty()) {
    if (const char* env = std::getenv("BYZLAB_OUT_DIR"); env && *env) out = env;
  }
  if (out.empty()) throw byzlab::ConfigError("no output directory: pass --out or set BYZLAB_OUT_DIR");
  byzlab::cli::validate_experiment(config, config_path);

  const auto files = byzlab::cli::run_experiment(config, out, [](const std::string& line) {
    std::cerr << line << "\n";
  });
  for (const auto& f : files) std::cout << f.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator of collaborative learning under Byzantine attack"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a preset and write its results");
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config_path;
  run->add_option("preset", preset, "preset name (see list-presets)")->required();
  run->add_option("--seed", seed, "root seed (default: the config's, else 1)");
  run->add_option("--out", out, "output directory (default: $BYZLAB_OUT_DIR)");
  run->add_option("--config", config_path, "config file overriding preset defaults");

  auto* plot = app.add_subcommand("plot", "write plotdata_<figure>.csv from a run directory");
  std::string figure;
  std::string in_dir;
  plot->add_option("figure", figure, "figure id")->required();
  plot->add_option("--in", in_dir, "run directory")->required();

  auto* list = app.add_subcommand("list-presets", "print preset names and descriptions");

  auto* validate = app.add_subcommand("validate", "check a config file and print it resolved");
  std::string validate_path;
  validate->add_option("--config", validate_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run) return run_command(preset, seed, out, config_path);
    if (*plot) {
      std::cout << byzlab::cli::emit_plotdata(in_dir, figure).string() << "\n";
      return 0;
    }
    if (*list) {
      for (const auto& p : byzlab::cli::presets()) {
        std::cout << p.name << "\t" << p.figure << "\t" << p.description << "\n";
      }
      return 0;
    }
    if (*validate) {
      std::cout << byzlab::cli::emit_config(byzlab::cli::parse_config(validate_path));
      return 0;
    }
  } catch (const byzlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
  return 0;
}
