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
#ifndef BYZLAB_AGGREGATORS_HPP_
#define BYZLAB_AGGREGATORS_HPP_

// Robust aggregation rules. Every rule scores each received update with an
// evaluator R and then filters (Multi-KRUM, RoFL, ERR, RD-SVM) or attenuates
// (SCC) before averaging. Distance-based evaluators compare an update with a
// reference update; behavior-based ones compare how a model behaves on data
// with and without the update.
//
// Received updates are always passed in ascending sender id. That order is
// the tie-break everywhere ties can occur.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "byzlab/dataset.hpp"
#include "byzlab/nn.hpp"
#include "byzlab/param_vector.hpp"

namespace byzlab::agg {

enum class EvaluatorKind { kMean, kMultiKrum, kScc, kRoflNorm, kRdSvmHinge, kErrRejection };
enum class DeltaPolicy { kFixed, kDynamicVariance };

bool is_distance_based(EvaluatorKind kind);
bool is_behavior_based(EvaluatorKind kind);

struct AggregatorSpec {
  EvaluatorKind kind = EvaluatorKind::kMean;
  double delta = 1.0;
  DeltaPolicy delta_policy = DeltaPolicy::kFixed;
  int f = 0;                         // assumed Byzantine count (Multi-KRUM, ERR)
  std::size_t eval_set_size = 256;   // behavior-based test batch cap
  // RD-SVM: true when candidates are updates applied to the current model,
  // false when they are full model weights.
  bool candidates_are_updates = true;
};

struct AggregationOutcome {
  ParamVector aggregate;
  std::vector<double> per_update_score;
  std::vector<bool> accepted;
  std::vector<bool> clipped;
  bool empty_acceptance = false;

  std::size_t accepted_count() const;
};

/// Arithmetic mean; all accepted, all scores 0.
AggregationOutcome mean_aggregate(std::span<const ParamVector> updates);

/// Sum of L2 distances from theta to its n - f - 2 nearest elements of
/// `others` (theta itself must not be in `others`).
double krum_score(const ParamVector& theta, std::span<const ParamVector> others, int n, int f);

/// KRUM score of every update against all the others (self excluded by index).
std::vector<double> krum_scores(std::span<const ParamVector> updates, int f);

/// Same scores from a precomputed symmetric pairwise distance matrix.
std::vector<double> krum_scores_from_distances(const std::vector<std::vector<double>>& dist, int f);

/// Flags the `keep` lowest scores (ties by index).
std::vector<bool> keep_lowest(const std::vector<double>& scores, std::size_t keep);

/// Keeps the n - f lowest KRUM scores (ties by received order) and averages
/// them.
AggregationOutcome multi_krum_aggregate(std::span<const ParamVector> updates,
                                        const AggregatorSpec& spec);

/// f for which Multi-KRUM keeps floor((n + 3) / 2) of n updates.
int multi_krum_default_f(int n);

/// Pulls theta into the ball of radius delta around reference:
/// min(1, delta / ||theta - reference||) * (theta - reference) + reference.
ParamVector scc_clip(const ParamVector& theta, const ParamVector& reference, double delta);

/// Clips every received update toward own_update with radius spec.delta and
/// averages the clipped updates together with own_update. `updates` excludes
/// own_update. Scores are the distances to own_update.
AggregationOutcome scc_aggregate(std::span<const ParamVector> updates,
                                 const ParamVector& own_update, const AggregatorSpec& spec);

/// Root-mean-square distance from own_update to the neighbor updates.
double dynamic_delta(const ParamVector& own_update, std::span<const ParamVector> neighbor_updates);

/// Accepts updates with ||theta|| <= spec.delta and averages them. No
/// acceptance gives a zero aggregate with empty_acceptance set.
AggregationOutcome rofl_aggregate(std::span<const ParamVector> updates, const AggregatorSpec& spec);

/// hinge(candidate model) - hinge(reference model) on eval_set. With
/// candidate_is_update the candidate model is reference + candidate.
double rd_svm_evaluate(const ParamVector& candidate, const nn::Model& reference_model,
                       const Dataset& eval_set, bool candidate_is_update = true);

/// Rejects updates whose RD-SVM score exceeds spec.delta; averages the rest.
AggregationOutcome rd_svm_aggregate(std::span<const ParamVector> updates,
                                    const nn::Model& current_model, const Dataset& eval_set,
                                    const AggregatorSpec& spec);

/// Leave-one-out error-rate scores:
/// err(current + mean(all)) - err(current + mean(all except k)).
std::vector<double> err_scores(std::span<const ParamVector> updates,
                               const nn::Model& current_model, const Dataset& eval_set);

/// Rejects the spec.f largest ERR scores (ties: earlier received first) and
/// averages the rest.
AggregationOutcome err_aggregate(std::span<const ParamVector> updates,
                                 const nn::Model& current_model, const Dataset& eval_set,
                                 const AggregatorSpec& spec);

/// Everything a rule may need. Which fields are required depends on the kind.
struct AggregationContext {
  std::span<const ParamVector> updates;
  const ParamVector* own_update = nullptr;   // SCC
  const nn::Model* current_model = nullptr;  // RD-SVM, ERR
  const Dataset* eval_set = nullptr;         // RD-SVM, ERR
};

/// Dispatches on spec.kind. For SCC `updates` must exclude own_update.
AggregationOutcome aggregate(const AggregatorSpec& spec, const AggregationContext& ctx);

std::string_view to_string(EvaluatorKind kind);
std::string_view to_string(DeltaPolicy policy);
EvaluatorKind parse_evaluator_kind(std::string_view s);
DeltaPolicy parse_delta_policy(std::string_view s);

}  // namespace byzlab::agg

#endif  // BYZLAB_AGGREGATORS_HPP_
