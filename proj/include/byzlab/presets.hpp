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
#ifndef BYZLAB_PRESETS_HPP_
#define BYZLAB_PRESETS_HPP_

// Named experiments. A training preset expands a base RunConfig into
// variants (one simulator run each); a knowledge preset runs a sweep of
// distinguishing games. Names are stable: output files and plot tables key
// on them.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "byzlab/config.hpp"

namespace byzlab::cli {

enum class PresetKind { kTraining, kKnowledge };

struct Variant {
  std::string name;
  sim::RunConfig config;
};

struct Preset {
  std::string name;
  std::string figure;  // plot id its outputs feed
  std::string description;
  PresetKind kind = PresetKind::kTraining;
  std::function<void(ExperimentConfig&)> defaults;
  // Training presets: variants derived from the resolved base config.
  std::function<std::vector<Variant>(const ExperimentConfig&)> variants;
  // Knowledge presets: who evaluates (complete = a peer, star = the server).
  sim::TopologyKind subject = sim::TopologyKind::kComplete;
  bool dump_predictions = false;
};

const std::vector<Preset>& presets();

/// Throws ConfigError listing the available names.
const Preset& find_preset(std::string_view name);

/// Variants of a training preset for `config` (empty for knowledge presets).
std::vector<Variant> expand(const ExperimentConfig& config);

}  // namespace byzlab::cli

#endif  // BYZLAB_PRESETS_HPP_
