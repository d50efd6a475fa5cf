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
#ifndef BYZLAB_GAMES_HPP_
#define BYZLAB_GAMES_HPP_

// Distinguishing games for behavior-based evaluators. A group of honest
// control users trains a shared model; a test subject (a peer, or the server)
// holding a slice of the task's data judges every control update with its
// local evaluator. Ground truth is the same evaluator run on the full data
// domain (train and validation). Evaluation is passive: every update is
// aggregated with a plain mean, so the trajectory does not depend on the
// decisions being scored.

#include <cstdint>
#include <span>
#include <vector>

#include "byzlab/aggregators.hpp"
#include "byzlab/data.hpp"
#include "byzlab/nn.hpp"
#include "byzlab/simulator.hpp"

namespace byzlab::games {

struct GameRecord {
  int epoch = 0;
  int update_id = 0;
  bool ground_truth_benign = false;
  bool decision_benign = false;
  double score_local = 0.0;   // R on the subject's slice
  double score_global = 0.0;  // R on the full domain
};

/// Positive = "classified benign".
struct Confusion {
  std::size_t tp = 0;  // benign, judged benign
  std::size_t fp = 0;  // malicious, judged benign
  std::size_t tn = 0;  // malicious, judged malicious
  std::size_t fn = 0;  // benign, judged malicious

  std::size_t total() const { return tp + fp + tn + fn; }
};

struct DistinguisherReport {
  agg::EvaluatorKind evaluator = agg::EvaluatorKind::kRdSvmHinge;
  data::KnowledgeMode mode = data::KnowledgeMode::kIidFraction;
  double knowledge_degree = 0.0;
  double accuracy = 0.0;
  double fpr = 0.0;  // fp / (fp + tn); 0 when nothing was malicious
  Confusion counts;
};

/// Accuracy and false-positive rate from decisions vs ground truth.
DistinguisherReport summarize(std::span<const GameRecord> records);

struct LearningPotentialReport {
  double acc_local = 0.0;
  double acc_all = 0.0;
  double potential = 0.0;  // acc_all - acc_local
};

/// Evaluator score of co_updates[index] against current_model on `data`.
/// RD-SVM ignores the other co-updates; ERR uses them for its leave-one-out
/// mean. Throws PreconditionError for distance-based evaluators.
double behavior_score(agg::EvaluatorKind evaluator, std::span<const ParamVector> co_updates,
                      std::size_t index, const nn::Model& current_model, const Dataset& data);

/// True iff the score on the full domain is below delta.
bool ground_truth_label(std::span<const ParamVector> co_updates, std::size_t index,
                        const nn::Model& current_model, agg::EvaluatorKind evaluator,
                        const Dataset& full_domain, double delta);

/// Single-update form (the update is its own only co-update).
bool ground_truth_label(const ParamVector& update, const nn::Model& current_model,
                        agg::EvaluatorKind evaluator, const Dataset& full_domain, double delta);

/// Default benign threshold. RD-SVM: 0 (the update must lower the hinge
/// loss). ERR: a positive value below one sample of error-rate resolution,
/// so an update whose removal changes nothing counts as benign.
double default_delta(agg::EvaluatorKind evaluator);

struct TrainBudget {
  nn::OptimizerKind optimizer = nn::OptimizerKind::kAdam;
  double learning_rate = 0.01;
  int batch_size = 32;
  int epochs = 5;  // full passes over the training set
};

/// Trains one model on `local` and one on `all_users` from the same
/// initialization and budget; reports the validation accuracy gap.
LearningPotentialReport learning_potential(const Dataset& local, const Dataset& all_users,
                                           const Dataset& validation, const nn::ModelShape& shape,
                                           const TrainBudget& budget, std::uint64_t seed);

struct GameConfig {
  // complete: the subject is a peer that also trains. star: the subject is
  // the server and only evaluates.
  sim::TopologyKind topology = sim::TopologyKind::kComplete;
  sim::DataSpec data{sim::DatasetKind::kMnist, {}, "Outcome", true, 3000, 1000,
                     sim::PartitionKind::kSizes, {}};
  nn::ModelShape shape{{784, 32, 10}, nn::Activation::kRelu, nn::OutputHead::kSoftmaxXent};
  TrainBudget training{nn::OptimizerKind::kAdam, 0.01, 32, 10};
  int potential_epochs = 5;

  // Control users receive a linear ramp of train-set fractions.
  int control_users = 9;
  double control_min_fraction = 0.05;
  double control_max_fraction = 0.15;

  std::vector<agg::EvaluatorKind> evaluators{agg::EvaluatorKind::kRdSvmHinge,
                                             agg::EvaluatorKind::kErrRejection};
  std::uint64_t seed = 1;

  void validate() const;
};

/// Control-user slice sizes for a train set of `train_size` samples.
std::vector<std::size_t> control_sizes(const GameConfig& config, std::size_t train_size);

struct KnowledgePoint {
  data::KnowledgeMode mode = data::KnowledgeMode::kIidFraction;
  double degree = 1.0;
};

struct SweepPoint {
  KnowledgePoint knowledge;
  std::size_t subject_samples = 0;
  LearningPotentialReport potential;
  std::vector<DistinguisherReport> reports;      // one per config.evaluators
  std::vector<std::vector<GameRecord>> records;  // parallel to reports
};

/// One training process per knowledge point, in input order.
std::vector<SweepPoint> play_rind_sweep(const GameConfig& config,
                                        std::span<const KnowledgePoint> knowledge);

/// play_rind_sweep with the server as subject. Requires a star topology.
std::vector<SweepPoint> server_mode_sweep(const GameConfig& config,
                                          std::span<const KnowledgePoint> knowledge);

/// Spearman rank correlation (average ranks for ties). NaN when either
/// series is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace byzlab::games

#endif  // BYZLAB_GAMES_HPP_
