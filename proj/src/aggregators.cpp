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
#include "byzlab/aggregators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "byzlab/error.hpp"

namespace byzlab::agg {
namespace {

void require_nonempty(std::span<const ParamVector> updates, const char* op) {
  if (updates.empty()) throw PreconditionError(std::string(op) + ": no updates");
  for (const auto& u : updates) updates.front().check_same_length(u, op);
}

ParamVector mean_of(std::span<const ParamVector> updates, const std::vector<bool>& keep) {
  ParamVector sum = ParamVector::zeros(updates.front().size());
  std::size_t count = 0;
  for (std::size_t k = 0; k < updates.size(); ++k) {
    if (!keep[k]) continue;
    sum += updates[k];
    ++count;
  }
  if (count > 0) sum /= static_cast<double>(count);
  return sum;
}

AggregationOutcome finish(std::span<const ParamVector> updates, std::vector<double> scores,
                          std::vector<bool> accepted) {
  AggregationOutcome out;
  out.aggregate = mean_of(updates, accepted);
  out.per_update_score = std::move(scores);
  out.clipped.assign(updates.size(), false);
  out.empty_acceptance = std::none_of(accepted.begin(), accepted.end(), [](bool b) { return b; });
  out.accepted = std::move(accepted);
  return out;
}

// Indices sorted by score ascending; equal scores keep received order.
std::vector<std::size_t> rank_ascending(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return order;
}

}  // namespace

bool is_distance_based(EvaluatorKind kind) {
  return kind == EvaluatorKind::kMultiKrum || kind == EvaluatorKind::kScc ||
         kind == EvaluatorKind::kRoflNorm;
}

bool is_behavior_based(EvaluatorKind kind) {
  return kind == EvaluatorKind::kRdSvmHinge || kind == EvaluatorKind::kErrRejection;
}

std::size_t AggregationOutcome::accepted_count() const {
  return static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), true));
}

AggregationOutcome mean_aggregate(std::span<const ParamVector> updates) {
  require_nonempty(updates, "mean_aggregate");
  return finish(updates, std::vector<double>(updates.size(), 0.0),
                std::vector<bool>(updates.size(), true));
}

// ---------------------------------------------------------------------------
// Multi-KRUM

double krum_score(const ParamVector& theta, std::span<const ParamVector> others, int n, int f) {
  const int m = n - f - 2;
  if (m < 1) {
    throw PreconditionError("krum_score: n - f - 2 = " + std::to_string(m) + " < 1 (n=" +
                            std::to_string(n) + ", f=" + std::to_string(f) + ")");
  }
  if (others.size() < static_cast<std::size_t>(m)) {
    throw PreconditionError("krum_score: need " + std::to_string(m) + " other updates, got " +
                            std::to_string(others.size()));
  }
  std::vector<double> d;
  d.reserve(others.size());
  for (const auto& o : others) d.push_back(distance(theta, o));
  std::partial_sort(d.begin(), d.begin() + m, d.end());
  // Sum in sorted order so the score does not depend on the order of `others`.
  double score = 0.0;
  for (int i = 0; i < m; ++i) score += d[static_cast<std::size_t>(i)];
  return score;
}

std::vector<double> krum_scores_from_distances(const std::vector<std::vector<double>>& dist, int f) {
  const std::size_t n = dist.size();
  const int m = static_cast<int>(n) - f - 2;
  if (m < 1) {
    throw PreconditionError("multi_krum: n - f - 2 = " + std::to_string(m) + " < 1 (n=" +
                            std::to_string(n) + ", f=" + std::to_string(f) + ")");
  }
  std::vector<double> scores(n);
  std::vector<double> row;
  for (std::size_t a = 0; a < n; ++a) {
    row.clear();
    for (std::size_t b = 0; b < n; ++b) {
      if (b != a) row.push_back(dist[a][b]);
    }
    std::partial_sort(row.begin(), row.begin() + m, row.end());
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += row[static_cast<std::size_t>(i)];
    scores[a] = s;
  }
  return scores;
}

std::vector<double> krum_scores(std::span<const ParamVector> updates, int f) {
  require_nonempty(updates, "krum_scores");
  const std::size_t n = updates.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) dist[a][b] = dist[b][a] = distance(updates[a], updates[b]);
  }
  return krum_scores_from_distances(dist, f);
}

std::vector<bool> keep_lowest(const std::vector<double>& scores, std::size_t keep) {
  std::vector<bool> accepted(scores.size(), false);
  const auto order = rank_ascending(scores);
  for (std::size_t r = 0; r < keep && r < order.size(); ++r) accepted[order[r]] = true;
  return accepted;
}

int multi_krum_default_f(int n) { return n - (n + 3) / 2; }

AggregationOutcome multi_krum_aggregate(std::span<const ParamVector> updates,
                                        const AggregatorSpec& spec) {
  if (spec.f < 0) throw PreconditionError("multi_krum: f must be >= 0");
  auto scores = krum_scores(updates, spec.f);
  auto accepted = keep_lowest(scores, updates.size() - static_cast<std::size_t>(spec.f));
  return finish(updates, std::move(scores), std::move(accepted));
}

// ---------------------------------------------------------------------------
// Self-centered clipping

ParamVector scc_clip(const ParamVector& theta, const ParamVector& reference, double delta) {
  theta.check_same_length(reference, "scc_clip");
  if (delta < 0) throw PreconditionError("scc_clip: delta must be >= 0");
  ParamVector diff = theta - reference;
  const double norm = diff.norm();
  if (norm <= delta) return theta;
  diff *= delta / norm;
  return diff += reference;
}

AggregationOutcome scc_aggregate(std::span<const ParamVector> updates,
                                 const ParamVector& own_update, const AggregatorSpec& spec) {
  for (const auto& u : updates) own_update.check_same_length(u, "scc_aggregate");
  if (spec.delta < 0) throw PreconditionError("scc_aggregate: delta must be >= 0");
  AggregationOutcome out;
  out.per_update_score.reserve(updates.size());
  out.accepted.assign(updates.size(), true);
  out.clipped.reserve(updates.size());
  // Accumulate deviations from own_update so the clipped ball is exact.
  ParamVector deviation_sum = ParamVector::zeros(own_update.size());
  for (const auto& u : updates) {
    ParamVector diff = u - own_update;
    const double norm = diff.norm();
    out.per_update_score.push_back(norm);
    const bool clip = norm > spec.delta;
    out.clipped.push_back(clip);
    if (clip) diff *= spec.delta / norm;
    deviation_sum += diff;
  }
  out.aggregate = own_update;
  out.aggregate.add_scaled(deviation_sum, 1.0 / static_cast<double>(updates.size() + 1));
  return out;
}

double dynamic_delta(const ParamVector& own_update, std::span<const ParamVector> neighbor_updates) {
  if (neighbor_updates.empty()) throw PreconditionError("dynamic_delta: no neighbor updates");
  double sum = 0.0;
  for (const auto& u : neighbor_updates) sum += squared_distance(own_update, u);
  return std::sqrt(sum / static_cast<double>(neighbor_updates.size()));
}

// ---------------------------------------------------------------------------
// RoFL norm bound

AggregationOutcome rofl_aggregate(std::span<const ParamVector> updates, const AggregatorSpec& spec) {
  require_nonempty(updates, "rofl_aggregate");
  if (!(spec.delta > 0)) throw PreconditionError("rofl_aggregate: delta must be > 0");
  std::vector<double> scores;
  std::vector<bool> accepted;
  for (const auto& u : updates) {
    const double norm = u.norm();
    scores.push_back(norm);
    accepted.push_back(norm <= spec.delta);
  }
  return finish(updates, std::move(scores), std::move(accepted));
}

// ---------------------------------------------------------------------------
// Behavior-based rules

double rd_svm_evaluate(const ParamVector& candidate, const nn::Model& reference_model,
                       const Dataset& eval_set, bool candidate_is_update) {
  candidate.check_same_length(reference_model.params, "rd_svm_evaluate");
  if (eval_set.empty()) throw PreconditionError("rd_svm_evaluate: empty eval set");
  nn::Model cand = reference_model;
  if (candidate_is_update) {
    cand.params += candidate;
  } else {
    cand.params = candidate;
  }
  return nn::mean_loss(cand, eval_set, nn::Loss::kHinge) -
         nn::mean_loss(reference_model, eval_set, nn::Loss::kHinge);
}

AggregationOutcome rd_svm_aggregate(std::span<const ParamVector> updates,
                                    const nn::Model& current_model, const Dataset& eval_set,
                                    const AggregatorSpec& spec) {
  require_nonempty(updates, "rd_svm_aggregate");
  std::vector<double> scores;
  std::vector<bool> accepted;
  for (const auto& u : updates) {
    const double r = rd_svm_evaluate(u, current_model, eval_set, spec.candidates_are_updates);
    scores.push_back(r);
    accepted.push_back(!(r > spec.delta));
  }
  if (!spec.candidates_are_updates) {
    // Candidates are models: aggregate their offsets from the current model.
    std::vector<ParamVector> offsets;
    for (const auto& u : updates) offsets.push_back(u - current_model.params);
    return finish(offsets, std::move(scores), std::move(accepted));
  }
  return finish(updates, std::move(scores), std::move(accepted));
}

std::vector<double> err_scores(std::span<const ParamVector> updates,
                               const nn::Model& current_model, const Dataset& eval_set) {
  require_nonempty(updates, "err_scores");
  current_model.params.check_same_length(updates.front(), "err_scores");
  if (eval_set.empty()) throw PreconditionError("err_scores: empty eval set");
  const std::size_t n = updates.size();
  ParamVector sum = ParamVector::zeros(updates.front().size());
  for (const auto& u : updates) sum += u;

  nn::Model with_all = current_model;
  with_all.params.add_scaled(sum, 1.0 / static_cast<double>(n));
  const double err_all = nn::evaluate(with_all, eval_set, nn::Metric::kErrorRate);

  std::vector<double> scores(n);
  for (std::size_t k = 0; k < n; ++k) {
    nn::Model without = current_model;
    if (n > 1) {
      ParamVector rest = sum - updates[k];
      without.params.add_scaled(rest, 1.0 / static_cast<double>(n - 1));
    }
    scores[k] = err_all - nn::evaluate(without, eval_set, nn::Metric::kErrorRate);
  }
  return scores;
}

AggregationOutcome err_aggregate(std::span<const ParamVector> updates,
                                 const nn::Model& current_model, const Dataset& eval_set,
                                 const AggregatorSpec& spec) {
  require_nonempty(updates, "err_aggregate");
  if (spec.f < 0 || static_cast<std::size_t>(spec.f) >= updates.size()) {
    throw PreconditionError("err_aggregate: need 0 <= f < n (f=" + std::to_string(spec.f) +
                            ", n=" + std::to_string(updates.size()) + ")");
  }
  auto scores = err_scores(updates, current_model, eval_set);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<bool> accepted(updates.size(), true);
  for (int r = 0; r < spec.f; ++r) accepted[order[static_cast<std::size_t>(r)]] = false;
  return finish(updates, std::move(scores), std::move(accepted));
}

// ---------------------------------------------------------------------------
// Dispatch

AggregationOutcome aggregate(const AggregatorSpec& spec, const AggregationContext& ctx) {
  auto need_behavior_inputs = [&](const char* name) {
    if (ctx.current_model == nullptr || ctx.eval_set == nullptr) {
      throw PreconditionError(std::string(name) + " needs a current model and an eval set");
    }
  };
  switch (spec.kind) {
    case EvaluatorKind::kMean:
      return mean_aggregate(ctx.updates);
    case EvaluatorKind::kMultiKrum:
      return multi_krum_aggregate(ctx.updates, spec);
    case EvaluatorKind::kScc:
      if (ctx.own_update == nullptr) throw PreconditionError("scc needs the aggregator's own update");
      return scc_aggregate(ctx.updates, *ctx.own_update, spec);
    case EvaluatorKind::kRoflNorm:
      return rofl_aggregate(ctx.updates, spec);
    case EvaluatorKind::kRdSvmHinge:
      need_behavior_inputs("rd_svm");
      return rd_svm_aggregate(ctx.updates, *ctx.current_model, *ctx.eval_set, spec);
    case EvaluatorKind::kErrRejection:
      need_behavior_inputs("err");
      return err_aggregate(ctx.updates, *ctx.current_model, *ctx.eval_set, spec);
  }
  throw PreconditionError("unknown evaluator kind");
}

std::string_view to_string(EvaluatorKind kind) {
  switch (kind) {
    case EvaluatorKind::kMean: return "mean";
    case EvaluatorKind::kMultiKrum: return "multi_krum";
    case EvaluatorKind::kScc: return "scc";
    case EvaluatorKind::kRoflNorm: return "rofl_norm";
    case EvaluatorKind::kRdSvmHinge: return "rd_svm_hinge";
    case EvaluatorKind::kErrRejection: return "err_rejection";
  }
  return "?";
}

std::string_view to_string(DeltaPolicy policy) {
  return policy == DeltaPolicy::kFixed ? "fixed" : "dynamic_variance";
}

EvaluatorKind parse_evaluator_kind(std::string_view s) {
  for (auto k : {EvaluatorKind::kMean, EvaluatorKind::kMultiKrum, EvaluatorKind::kScc,
                 EvaluatorKind::kRoflNorm, EvaluatorKind::kRdSvmHinge, EvaluatorKind::kErrRejection}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown aggregator '" + std::string(s) +
                    "' (mean, multi_krum, scc, rofl_norm, rd_svm_hinge, err_rejection)");
}

DeltaPolicy parse_delta_policy(std::string_view s) {
  if (s == "fixed") return DeltaPolicy::kFixed;
  if (s == "dynamic_variance") return DeltaPolicy::kDynamicVariance;
  throw ConfigError("unknown delta policy '" + std::string(s) + "' (fixed, dynamic_variance)");
}

}  // namespace byzlab::agg
