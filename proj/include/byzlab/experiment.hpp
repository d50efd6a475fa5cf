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
#ifndef BYZLAB_EXPERIMENT_HPP_
#define BYZLAB_EXPERIMENT_HPP_

// Running presets and persisting their results.
//
// A run directory holds:
//   config.ini                 resolved config (re-parses to the same config)
//   metrics.csv                preset,variant,seed,epoch,scope,metric,value
//   summary.txt                last recorded value of every honest_mean metric
//   predictions_<variant>.csv  index,ground_truth,prediction (presets that dump)
//
// Training presets record one row per (variant, epoch, scope, metric).
// Knowledge presets use variant "<mode>:<degree>", the final training epoch,
// and the subject's scope ("server" or "user:<id>").

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "byzlab/config.hpp"
#include "byzlab/csv.hpp"

namespace byzlab::cli {

using Log = std::function<void(const std::string&)>;

struct MetricRow {
  std::string variant;
  int epoch = 0;
  std::string scope;
  std::string metric;
  double value = 0.0;
};

/// Rows a training variant contributes, from its epoch traces.
std::vector<MetricRow> metric_rows(const std::string& variant, const std::vector<sim::EpochTrace>& traces);

/// metrics.csv table for `rows` (non-finite values are an error).
csv::Table metrics_table(const ExperimentConfig& config, const std::vector<MetricRow>& rows);

/// Runs every variant (or the knowledge sweep) and writes the run
/// directory. Returns the written files.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                  const std::filesystem::path& out_dir,
                                                  const Log& log = {});

/// Figure ids emit_plotdata understands.
const std::vector<std::string>& figure_ids();

/// Wide plot table built from a run directory. Throws ConfigError for an
/// unknown figure and Error naming the first missing series.
csv::Table plot_table(const std::filesystem::path& run_dir, std::string_view figure);

/// Writes plotdata_<figure>.csv into run_dir and returns its path. Nothing
/// is written when plot_table throws.
std::filesystem::path emit_plotdata(const std::filesystem::path& run_dir, std::string_view figure);

}  // namespace byzlab::cli

#endif  // BYZLAB_EXPERIMENT_HPP_
