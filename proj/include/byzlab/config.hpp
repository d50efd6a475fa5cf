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
#ifndef BYZLAB_CONFIG_HPP_
#define BYZLAB_CONFIG_HPP_

// Experiment configuration files.
//
// Grammar (one statement per line):
//   # comment            ignored, as are blank lines
//   [section]            starts a section; keys below belong to it
//   key = value          value runs to end of line, surrounding blanks trimmed
//
// `preset` and `seed` live before any section. A file naming only a preset
// resolves to that preset's defaults; every other key overrides one field.
// Lists are comma-separated. Booleans are true/false. Target overrides are
// "index:value" pairs. Unknown sections or keys, malformed values and
// violated constraints raise ConfigError prefixed with "<file>:<line>:".
// docs/config.md lists every key.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "byzlab/games.hpp"
#include "byzlab/simulator.hpp"

namespace byzlab::cli {

struct ExperimentConfig {
  std::string preset;
  std::uint64_t seed = 1;
  sim::RunConfig run;

  // Knowledge-sweep presets only.
  int control_users = 9;
  double control_min_fraction = 0.05;
  double control_max_fraction = 0.15;
  int potential_epochs = 5;
  std::vector<agg::EvaluatorKind> evaluators{agg::EvaluatorKind::kRdSvmHinge,
                                             agg::EvaluatorKind::kErrRejection};
  std::vector<double> label_degrees;
  std::vector<double> fraction_degrees;

  /// Game settings derived from the shared data/model/training keys.
  games::GameConfig game_config(sim::TopologyKind subject) const;
};

/// Where each key was set, for error messages ("section.key" -> line).
using KeyLines = std::map<std::string, int>;

/// Parses config text. Applies the named preset's defaults first (or
/// `preset_override` when non-empty; a differing `preset` key is an error),
/// then every key in file order. Does not run constraint checks.
ExperimentConfig parse_config_text(std::string_view text, std::string_view source,
                                   std::string_view preset_override = {},
                                   KeyLines* lines = nullptr);

/// parse_config_text plus validate_experiment.
ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::string_view preset_override = {});

/// Config with only the preset's defaults.
ExperimentConfig preset_defaults(std::string_view preset);

/// Runs constraint checks on the base config and every variant the preset
/// derives from it. ConfigError messages are prefixed with the source and
/// the line that set the offending key, when known.
void validate_experiment(const ExperimentConfig& config, std::string_view source = {},
                         const KeyLines& lines = {});

/// Every key with its resolved value, in canonical order. Re-parsing the
/// output reproduces the config.
std::string emit_config(const ExperimentConfig& config);

/// All keys as "section.key", in canonical order.
std::vector<std::string> config_keys();

}  // namespace byzlab::cli

#endif  // BYZLAB_CONFIG_HPP_
