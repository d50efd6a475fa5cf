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
#include "byzlab/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "byzlab/error.hpp"

namespace byzlab::games {

namespace {

void require_behavior(agg::EvaluatorKind evaluator) {
  if (!agg::is_behavior_based(evaluator)) {
    throw PreconditionError("games: evaluator '" + std::string(agg::to_string(evaluator)) +
                            "' is not behavior-based");
  }
}

// Scores of every co-update on one data set.
std::vector<double> all_scores(agg::EvaluatorKind evaluator, std::span<const ParamVector> co_updates,
                               const nn::Model& current, const Dataset& data) {
  if (evaluator == agg::EvaluatorKind::kErrRejection) return agg::err_scores(co_updates, current, data);
  const double base = nn::mean_loss(current, data, nn::Loss::kHinge);
  std::vector<double> out;
  out.reserve(co_updates.size());
  nn::Model moved = current;
  for (const auto& u : co_updates) {
    moved.params = current.params + u;
    out.push_back(nn::mean_loss(moved, data, nn::Loss::kHinge) - base);
  }
  return out;
}

void train_model(nn::Model& model, const Dataset& data, const TrainBudget& budget, Rng rng) {
  auto opt = nn::OptimizerState::make(budget.optimizer, budget.learning_rate, model.params.size());
  for (int e = 0; e < budget.epochs; ++e) {
    auto r = nn::local_train_step(model, opt, data, budget.batch_size, rng.split(static_cast<std::uint64_t>(e)));
    model = std::move(r.model);
    opt = std::move(r.optimizer);
  }
}

std::vector<SweepPoint> sweep(const GameConfig& config, std::span<const KnowledgePoint> knowledge) {
  config.validate();
  const bool peer = config.topology == sim::TopologyKind::kComplete;
  const int controls = config.control_users;

  sim::RunConfig rc;
  rc.topology = {sim::TopologyKind::kStar, controls};
  rc.data = config.data;
  rc.data.partition = sim::PartitionKind::kSizes;
  rc.data.sizes = control_sizes(config, config.data.train_size);
  rc.shape = config.shape;
  rc.seed = config.seed;
  const sim::RunInputs in = sim::build_inputs(rc);
  const Dataset domain = concat(in.train, in.validation, "domain");

  std::vector<Dataset> control_data;
  std::vector<std::size_t> union_base;
  for (int k = 0; k < controls; ++k) {
    const auto& idx = in.partition.assignments[static_cast<std::size_t>(k)];
    control_data.push_back(in.train.subset(idx, "control" + std::to_string(k)));
    union_base.insert(union_base.end(), idx.begin(), idx.end());
  }

  const Rng root(config.seed);
  std::vector<SweepPoint> out;
  for (const auto& point : knowledge) {
    SweepPoint sp;
    sp.knowledge = point;
    const auto slice_idx = data::knowledge_slice_indices(in.train, point.mode, point.degree, root.split("knowledge"));
    const Dataset slice = in.train.subset(slice_idx, "subject");
    sp.subject_samples = slice.size();

    std::vector<std::size_t> all_idx = union_base;
    all_idx.insert(all_idx.end(), slice_idx.begin(), slice_idx.end());
    std::sort(all_idx.begin(), all_idx.end());
    all_idx.erase(std::unique(all_idx.begin(), all_idx.end()), all_idx.end());
    TrainBudget pb = config.training;
    pb.epochs = config.potential_epochs;
    sp.potential = learning_potential(slice, in.train.subset(all_idx, "all_users"), in.validation,
                                      config.shape, pb, config.seed);

    Rng init_rng = root.split("init");
    nn::Model model = nn::init_model(config.shape, init_rng);
    const std::size_t p = model.params.size();
    const int trainers = controls + (peer ? 1 : 0);
    std::vector<nn::OptimizerState> opts(static_cast<std::size_t>(trainers),
                                         nn::OptimizerState::make(config.training.optimizer,
                                                                  config.training.learning_rate, p));
    sp.records.assign(config.evaluators.size(), {});
    const Rng train_root = root.split("train");
    for (int epoch = 1; epoch <= config.training.epochs; ++epoch) {
      std::vector<ParamVector> co;
      for (int k = 0; k < trainers; ++k) {
        const Dataset& local = k < controls ? control_data[static_cast<std::size_t>(k)] : slice;
        auto r = nn::local_train_step(model, opts[static_cast<std::size_t>(k)], local,
                                      config.training.batch_size,
                                      train_root.split(static_cast<std::uint64_t>(k)).split(static_cast<std::uint64_t>(epoch)));
        opts[static_cast<std::size_t>(k)] = std::move(r.optimizer);
        co.push_back(std::move(r.update));
      }
      // The subject judges what it received; its own update stays out of
      // the co-updates so ERR's leave-one-out does not favor the slice.
      const std::span<const ParamVector> received(co.data(), static_cast<std::size_t>(controls));
      for (std::size_t e = 0; e < config.evaluators.size(); ++e) {
        const auto kind = config.evaluators[e];
        const double delta = default_delta(kind);
        const auto local = all_scores(kind, received, model, slice);
        const auto global = all_scores(kind, received, model, domain);
        for (int k = 0; k < controls; ++k) {
          const auto ku = static_cast<std::size_t>(k);
          sp.records[e].push_back({epoch, k, global[ku] < delta, local[ku] < delta, local[ku], global[ku]});
        }
      }
      ParamVector sum = ParamVector::zeros(p);
      for (const auto& u : co) sum += u;
      model.params.add_scaled(sum, 1.0 / static_cast<double>(co.size()));
    }
    for (std::size_t e = 0; e < config.evaluators.size(); ++e) {
      DistinguisherReport r = summarize(sp.records[e]);
      r.evaluator = config.evaluators[e];
      r.mode = point.mode;
      r.knowledge_degree = point.degree;
      sp.reports.push_back(r);
    }
    out.push_back(std::move(sp));
  }
  return out;
}

}  // namespace

DistinguisherReport summarize(std::span<const GameRecord> records) {
  DistinguisherReport r;
  for (const auto& g : records) {
    if (g.ground_truth_benign) {
      (g.decision_benign ? r.counts.tp : r.counts.fn) += 1;
    } else {
      (g.decision_benign ? r.counts.fp : r.counts.tn) += 1;
    }
  }
  const std::size_t total = r.counts.total();
  if (total > 0) r.accuracy = static_cast<double>(r.counts.tp + r.counts.tn) / static_cast<double>(total);
  const std::size_t malicious = r.counts.fp + r.counts.tn;
  if (malicious > 0) r.fpr = static_cast<double>(r.counts.fp) / static_cast<double>(malicious);
  return r;
}

double behavior_score(agg::EvaluatorKind evaluator, std::span<const ParamVector> co_updates,
                      std::size_t index, const nn::Model& current_model, const Dataset& data) {
  require_behavior(evaluator);
  if (index >= co_updates.size()) {
    throw PreconditionError("behavior_score: index " + std::to_string(index) + " out of range for " +
                            std::to_string(co_updates.size()) + " co-updates");
  }
  if (evaluator == agg::EvaluatorKind::kRdSvmHinge) {
    return agg::rd_svm_evaluate(co_updates[index], current_model, data, true);
  }
  return agg::err_scores(co_updates, current_model, data)[index];
}

bool ground_truth_label(std::span<const ParamVector> co_updates, std::size_t index,
                        const nn::Model& current_model, agg::EvaluatorKind evaluator,
                        const Dataset& full_domain, double delta) {
  return behavior_score(evaluator, co_updates, index, current_model, full_domain) < delta;
}

bool ground_truth_label(const ParamVector& update, const nn::Model& current_model,
                        agg::EvaluatorKind evaluator, const Dataset& full_domain, double delta) {
  return ground_truth_label(std::span<const ParamVector>(&update, 1), 0, current_model, evaluator,
                            full_domain, delta);
}

double default_delta(agg::EvaluatorKind evaluator) {
  require_behavior(evaluator);
  return evaluator == agg::EvaluatorKind::kErrRejection ? 1e-9 : 0.0;
}

LearningPotentialReport learning_potential(const Dataset& local, const Dataset& all_users,
                                           const Dataset& validation, const nn::ModelShape& shape,
                                           const TrainBudget& budget, std::uint64_t seed) {
  if (local.empty()) throw PreconditionError("learning_potential: empty local set");
  if (all_users.empty()) throw PreconditionError("learning_potential: empty union set");
  if (validation.empty()) throw PreconditionError("learning_potential: empty validation set");
  Rng init_rng = Rng(seed).split("init");
  const nn::Model initial = nn::init_model(shape, init_rng);
  const Rng train_rng = Rng(seed).split("potential");
  nn::Model m_local = initial;
  nn::Model m_all = initial;
  train_model(m_local, local, budget, train_rng);
  train_model(m_all, all_users, budget, train_rng);
  LearningPotentialReport r;
  r.acc_local = nn::evaluate(m_local, validation, nn::Metric::kAccuracy);
  r.acc_all = nn::evaluate(m_all, validation, nn::Metric::kAccuracy);
  r.potential = r.acc_all - r.acc_local;
  return r;
}

void GameConfig::validate() const {
  if (control_users < 1) throw ConfigError("games.control_users: must be >= 1");
  if (!(control_min_fraction > 0.0) || control_max_fraction < control_min_fraction || control_max_fraction > 1.0) {
    throw ConfigError("games.control_min_fraction: need 0 < min <= max <= 1");
  }
  if (training.epochs < 1) throw ConfigError("training.epochs: must be >= 1");
  if (potential_epochs < 1) throw ConfigError("games.potential_epochs: must be >= 1");
  if (training.batch_size < 1) throw ConfigError("training.batch_size: must be >= 1");
  if (evaluators.empty()) throw ConfigError("games.evaluators: must not be empty");
  for (auto e : evaluators) {
    if (!agg::is_behavior_based(e)) {
      throw ConfigError("games.evaluators: '" + std::string(agg::to_string(e)) + "' is not behavior-based");
    }
  }
  const auto sizes = control_sizes(*this, data.train_size);
  const std::size_t sum = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (sum > data.train_size) {
    throw ConfigError("games.control_max_fraction: " + std::to_string(sum) + " samples exceed the train set of " +
                      std::to_string(data.train_size));
  }
  try {
    shape.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("model.layers: ") + e.what());
  }
}

std::vector<std::size_t> control_sizes(const GameConfig& config, std::size_t train_size) {
  std::vector<std::size_t> sizes;
  const int c = config.control_users;
  for (int k = 0; k < c; ++k) {
    const double t = c > 1 ? static_cast<double>(k) / (c - 1) : 0.0;
    const double f = config.control_min_fraction + t * (config.control_max_fraction - config.control_min_fraction);
    sizes.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(f * static_cast<double>(train_size)))));
  }
  return sizes;
}

std::vector<SweepPoint> play_rind_sweep(const GameConfig& config, std::span<const KnowledgePoint> knowledge) {
  return sweep(config, knowledge);
}

std::vector<SweepPoint> server_mode_sweep(const GameConfig& config, std::span<const KnowledgePoint> knowledge) {
  if (config.topology != sim::TopologyKind::kStar) {
    throw PreconditionError("server_mode_sweep: needs a star topology (server as subject)");
  }
  return sweep(config, knowledge);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("spearman: series have " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()) + " points");
  }
  if (x.size() < 2) throw PreconditionError("spearman: need at least two points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace byzlab::games
