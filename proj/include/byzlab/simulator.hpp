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
#ifndef BYZLAB_SIMULATOR_HPP_
#define BYZLAB_SIMULATOR_HPP_

// Epoch loop of collaborative training: every honest user trains locally and
// produces an update, adversaries craft theirs after observing the honest
// ones, and every aggregation point (the server in a star, each honest user
// in a complete graph) combines what it received and advances its model.
//
// Randomness: one root seed. Data preparation, model init and each user's
// per-epoch shuffle draw from separate split() streams, so results do not
// depend on execution order.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "byzlab/adversary.hpp"
#include "byzlab/aggregators.hpp"
#include "byzlab/data.hpp"
#include "byzlab/dataset.hpp"
#include "byzlab/nn.hpp"

namespace byzlab::sim {

enum class TopologyKind { kStar, kComplete };

struct Topology {
  TopologyKind kind = TopologyKind::kStar;
  int n_users = 20;
  bool server_present() const { return kind == TopologyKind::kStar; }
};

enum class DatasetKind { kMnist, kPimaSynthetic, kCsv };
enum class PartitionKind { kIid, kByLabel, kSizes };

struct DataSpec {
  DatasetKind dataset = DatasetKind::kMnist;
  // MNIST: directory holding the IDX files (empty = bundled subset).
  // CSV: the file.
  std::string path;
  std::string label_column = "Outcome";
  bool normalize = true;
  // MNIST: stratified subsample sizes. Tabular: train_size rows train, the
  // rest validation (validation_size is ignored).
  std::size_t train_size = 6000;
  std::size_t validation_size = 1000;
  PartitionKind partition = PartitionKind::kIid;
  std::vector<std::size_t> sizes;  // PartitionKind::kSizes
};

/// Where the adversary gets the honest updates it reacts to.
enum class Observation {
  kLastMover,      // this epoch's honest updates
  kPreviousEpoch,  // last epoch's honest updates as an estimate
};

/// What peers transmit in a complete topology. A star always exchanges
/// updates against the server's model.
enum class Exchange {
  kUpdates,  // local updates only
  kModels,   // freshly trained local models
};

struct RunConfig {
  Topology topology;
  Exchange exchange = Exchange::kUpdates;
  agg::AggregatorSpec aggregator;

  adv::AttackKind attack = adv::AttackKind::kNone;
  adv::TargetKind target_kind = adv::TargetKind::kAllZero;
  std::map<std::size_t, double> target_overrides;
  std::vector<int> adversary_ids;
  // Shrink the crafted update toward an innocuous anchor until filtering
  // rules (Multi-KRUM, RoFL, RD-SVM, ERR) accept it.
  bool fit_attack = true;
  Observation observation = Observation::kLastMover;

  DataSpec data;
  nn::ModelShape shape{{784, 128, 64, 10}, nn::Activation::kRelu, nn::OutputHead::kSoftmaxXent};
  nn::OptimizerKind optimizer = nn::OptimizerKind::kAdam;
  double learning_rate = 0.01;
  int batch_size = 32;
  int local_steps = 0;  // 0 = one pass over the local data per epoch

  int epochs = 30;
  std::uint64_t seed = 1;

  // Model-quality metrics are computed on epochs 1, every eval_every-th and
  // the last. 0 for a size means the whole set.
  int eval_every = 1;
  std::size_t eval_size = 0;
  std::size_t train_eval_size = 1000;

  /// Throws ConfigError whose message starts with the offending config key
  /// ("section.key: ...").
  void validate() const;
};

/// Datasets and partition derived from a config.
struct RunInputs {
  Dataset train;
  Dataset validation;
  data::Partition partition;
  Dataset validation_eval;  // accuracy / error-rate set
  Dataset train_eval;       // training-loss set
  Dataset server_eval;      // behavior-based rules at the server
};

RunInputs build_inputs(const RunConfig& config);

struct UserState {
  int id = 0;
  nn::Model model;
  nn::OptimizerState optimizer;
  Dataset local_data;
  Dataset eval_data;  // behavior-based rules run by this user
  bool is_adversary = false;
};

struct SimState {
  std::vector<UserState> users;
  nn::Model global;  // star only
  ParamVector target;
  // Epoch-1 honest transmissions (models or updates, per exchange mode).
  std::map<int, ParamVector> initial_updates;
  std::map<int, ParamVector> previous_updates;  // last epoch's honest updates
};

struct EpochTrace {
  int epoch = 0;  // 1-based
  // Honest updates, plus for a star the crafted adversarial updates.
  std::map<int, ParamVector> updates;
  // Keyed "server" or "user:<id>".
  std::map<std::string, agg::AggregationOutcome> outcomes;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
};

SimState init_state(const RunConfig& config, const RunInputs& inputs);

/// Advances `state` by one epoch (1-based `epoch`).
EpochTrace run_epoch(SimState& state, const RunConfig& config, const RunInputs& inputs, int epoch);

struct RunOptions {
  // Keep update vectors and aggregates in the returned traces. Off by
  // default: a 20-user MNIST run would hold ~0.5 GB.
  bool keep_vectors = false;
  std::function<void(const EpochTrace&)> observer;
};

struct RunResult {
  std::vector<EpochTrace> traces;
  SimState final_state;
};

RunResult run(const RunConfig& config, const RunInputs& inputs, const RunOptions& options = {});

/// Mean over honest users of ||params - target||.
double distance_to_target(const std::vector<UserState>& users, const ParamVector& target,
                          const nn::Model* global = nullptr);

/// The model an honest user currently holds (the global model in a star).
const nn::Model& honest_model(const SimState& state, const RunConfig& config, int user_id);

std::string_view to_string(TopologyKind k);
std::string_view to_string(DatasetKind k);
std::string_view to_string(PartitionKind k);
std::string_view to_string(Observation o);
std::string_view to_string(Exchange e);
Exchange parse_exchange(std::string_view s);
TopologyKind parse_topology(std::string_view s);
DatasetKind parse_dataset_kind(std::string_view s);
PartitionKind parse_partition_kind(std::string_view s);
Observation parse_observation(std::string_view s);

}  // namespace byzlab::sim

#endif  // BYZLAB_SIMULATOR_HPP_
