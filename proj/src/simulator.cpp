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
#include "byzlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include "byzlab/error.hpp"

#ifndef BYZLAB_DATA_DIR
#define BYZLAB_DATA_DIR "data"
#endif

namespace byzlab::sim {
namespace {

using agg::EvaluatorKind;
using adv::AttackKind;

constexpr std::uint64_t kPimaFixtureSeed = 0x5eed0768;

// Seeded subsample of at most `cap` rows, kept in original row order.
Dataset capped_subset(const Dataset& ds, std::size_t cap, Rng rng, const std::string& name) {
  if (cap == 0 || cap >= ds.size()) return ds;
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  order.resize(cap);
  std::sort(order.begin(), order.end());
  return ds.subset(order, name);
}

std::filesystem::path find_idx(const std::filesystem::path& dir, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (std::filesystem::exists(dir / n)) return dir / n;
  }
  throw Error("no IDX file among {" + names.front() + ", ...} in " + dir.string());
}

Dataset load_mnist_dir(const std::string& path) {
  const std::filesystem::path dir = path.empty() ? std::filesystem::path(BYZLAB_DATA_DIR) / "mnist" : std::filesystem::path(path);
  const auto images = find_idx(dir, {"train-images-idx3-ubyte.gz", "train-images-idx3-ubyte",
                                     "mnist10k-images-idx3-ubyte.gz", "mnist10k-images-idx3-ubyte"});
  const auto labels = find_idx(dir, {"train-labels-idx1-ubyte.gz", "train-labels-idx1-ubyte",
                                     "mnist10k-labels-idx1-ubyte.gz", "mnist10k-labels-idx1-ubyte"});
  return data::load_mnist_idx(images, labels);
}

bool filters_updates(EvaluatorKind k) {
  return k == EvaluatorKind::kMultiKrum || k == EvaluatorKind::kRoflNorm ||
         k == EvaluatorKind::kRdSvmHinge || k == EvaluatorKind::kErrRejection;
}

bool has_target(AttackKind k) {
  return k == AttackKind::kStateOverride || k == AttackKind::kStateOverrideScc;
}

// Evaluates `spec` on `received` with every adversarial slot replaced by
// `candidate` and reports whether all of those slots were accepted.
class AcceptanceProbe {
 public:
  AcceptanceProbe(const agg::AggregatorSpec& spec, std::vector<ParamVector> received,
                  std::vector<std::size_t> adversary_slots, const nn::Model* model,
                  const Dataset* eval_set)
      : spec_(spec),
        received_(std::move(received)),
        slots_(std::move(adversary_slots)),
        model_(model),
        eval_set_(eval_set) {
    if (spec_.kind == EvaluatorKind::kMultiKrum) {
      // Honest-to-honest distances do not depend on the candidate.
      const std::size_t n = received_.size();
      dist_.assign(n, std::vector<double>(n, 0.0));
      for (std::size_t a = 0; a < n; ++a) {
        if (is_slot(a)) continue;
        for (std::size_t b = a + 1; b < n; ++b) {
          if (!is_slot(b)) dist_[a][b] = dist_[b][a] = distance(received_[a], received_[b]);
        }
      }
    }
  }

  bool operator()(const ParamVector& candidate) {
    if (spec_.kind == EvaluatorKind::kRoflNorm) return candidate.norm() <= spec_.delta;
    if (spec_.kind == EvaluatorKind::kMultiKrum) {
      const std::size_t n = received_.size();
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          if (a == b) continue;
          const bool sa = is_slot(a);
          const bool sb = is_slot(b);
          if (sa && sb) dist_[a][b] = 0.0;
          else if (sa) dist_[a][b] = dist_[b][a] = distance(candidate, received_[b]);
        }
      }
      const auto accepted = agg::keep_lowest(agg::krum_scores_from_distances(dist_, spec_.f),
                                             n - static_cast<std::size_t>(spec_.f));
      return std::all_of(slots_.begin(), slots_.end(), [&](std::size_t s) { return accepted[s]; });
    }
    for (std::size_t s : slots_) received_[s] = candidate;
    agg::AggregationContext ctx{received_, nullptr, model_, eval_set_};
    const auto out = agg::aggregate(spec_, ctx);
    return std::all_of(slots_.begin(), slots_.end(), [&](std::size_t s) { return bool(out.accepted[s]); });
  }

 private:
  bool is_slot(std::size_t i) const { return std::find(slots_.begin(), slots_.end(), i) != slots_.end(); }

  const agg::AggregatorSpec& spec_;
  std::vector<ParamVector> received_;
  std::vector<std::size_t> slots_;
  const nn::Model* model_;
  const Dataset* eval_set_;
  std::vector<std::vector<double>> dist_;
};

struct EpochCounters {
  double adversary_slots = 0;
  double adversary_accepted = 0;
  double attack_scale_sum = 0;
  double attack_scale_count = 0;
  double clipped = 0;
  double received = 0;
  double crafted_clipped = 0;
  double empty_acceptance = 0;
  double dynamic_delta_sum = 0;
  double dynamic_delta_count = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Config and inputs

void RunConfig::validate() const {
  const int n = topology.n_users;
  if (n < 1) throw ConfigError("topology.n_users: must be >= 1");
  if (epochs < 0) throw ConfigError("training.epochs: must be >= 0");
  if (batch_size < 1) throw ConfigError("training.batch_size: must be >= 1");
  if (local_steps < 0) throw ConfigError("training.local_steps: must be >= 0");
  if (!(learning_rate >= 0)) throw ConfigError("training.learning_rate: must be >= 0");
  if (eval_every < 1) throw ConfigError("eval.every: must be >= 1");
  if (!(aggregator.delta >= 0)) throw ConfigError("aggregator.delta: delta must be >= 0");
  try {
    shape.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("model.layers: ") + e.what());
  }

  std::set<int> seen;
  for (int id : adversary_ids) {
    if (id < 0 || id >= n) throw ConfigError("attack.adversary_ids: id " + std::to_string(id) + " outside [0, " + std::to_string(n) + ")");
    if (!seen.insert(id).second) throw ConfigError("attack.adversary_ids: id " + std::to_string(id) + " listed twice");
  }
  if (attack != AttackKind::kNone) {
    if (adversary_ids.empty()) throw ConfigError("attack.adversary_ids: attack '" + std::string(adv::to_string(attack)) + "' needs at least one");
    if (static_cast<int>(adversary_ids.size()) >= n) throw ConfigError("attack.adversary_ids: at least one honest user required");
  }
  if (attack == AttackKind::kDissensus && topology.kind != TopologyKind::kComplete) {
    throw ConfigError("attack.kind: dissensus targets peers and needs topology = complete");
  }
  switch (aggregator.kind) {
    case EvaluatorKind::kMultiKrum:
      if (aggregator.f < 0 || n - aggregator.f - 2 < 1) {
        throw ConfigError("aggregator.f: multi_krum needs n - f - 2 >= 1 (n=" + std::to_string(n) + ", f=" + std::to_string(aggregator.f) + ")");
      }
      break;
    case EvaluatorKind::kErrRejection:
      if (aggregator.f < 0 || aggregator.f >= n) throw ConfigError("aggregator.f: err_rejection needs 0 <= f < n");
      break;
    case EvaluatorKind::kRoflNorm:
      if (!(aggregator.delta > 0)) throw ConfigError("aggregator.delta: rofl_norm needs delta > 0");
      break;
    case EvaluatorKind::kScc:
      if (topology.kind != TopologyKind::kComplete) throw ConfigError("aggregator.kind: scc clips toward the aggregator's own update and needs topology = complete");
      break;
    default:
      break;
  }
  if (aggregator.delta_policy == agg::DeltaPolicy::kDynamicVariance && aggregator.kind != EvaluatorKind::kScc) {
    throw ConfigError("aggregator.delta_policy: dynamic_variance applies to scc only");
  }
  if (agg::is_behavior_based(aggregator.kind) && aggregator.eval_set_size == 0) {
    throw ConfigError("aggregator.eval_set_size: must be >= 1");
  }
  if (data.partition == PartitionKind::kSizes && data.sizes.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("data.sizes: " + std::to_string(data.sizes.size()) + " sizes for " + std::to_string(n) + " users");
  }
}

RunInputs build_inputs(const RunConfig& config) {
  config.validate();
  const Rng root = Rng(config.seed).split("data");
  RunInputs in;
  const DataSpec& d = config.data;
  switch (d.dataset) {
    case DatasetKind::kMnist: {
      const Dataset full = load_mnist_dir(d.path);
      auto tv = data::stratified_split(full, d.train_size, d.validation_size, root.split("split"));
      in.train = std::move(tv.train);
      in.validation = std::move(tv.validation);
      break;
    }
    case DatasetKind::kPimaSynthetic:
    case DatasetKind::kCsv: {
      Dataset full = d.dataset == DatasetKind::kCsv
                         ? data::load_tabular_csv(d.path, d.label_column, d.normalize)
                         : data::make_synthetic_pima(Rng(kPimaFixtureSeed));
      if (d.dataset == DatasetKind::kPimaSynthetic && d.normalize) data::zscore_features(full);
      auto tv = data::shuffle_split(full, std::min(d.train_size, full.size()), root.split("split"));
      in.train = std::move(tv.train);
      in.validation = std::move(tv.validation);
      break;
    }
  }
  if (in.train.features() != static_cast<std::size_t>(config.shape.inputs())) {
    throw ConfigError("model.layers: input size " + std::to_string(config.shape.inputs()) + " but dataset has " +
                      std::to_string(in.train.features()) + " features");
  }
  const int n = config.topology.n_users;
  switch (d.partition) {
    case PartitionKind::kIid:
      in.partition = data::partition_iid(in.train.size(), n, root.split("partition"));
      break;
    case PartitionKind::kByLabel:
      in.partition = data::partition_by_label(in.train, n);
      break;
    case PartitionKind::kSizes:
      in.partition = data::partition_sizes(in.train.size(), d.sizes, root.split("partition"));
      break;
  }
  in.partition.validate(in.train.size());
  in.validation_eval = capped_subset(in.validation, config.eval_size, root.split("validation_eval"), "validation_eval");
  in.train_eval = capped_subset(in.train, config.train_eval_size, root.split("train_eval"), "train_eval");
  in.server_eval = capped_subset(in.validation, config.aggregator.eval_set_size, root.split("server_eval"), "server_eval");
  return in;
}

// ---------------------------------------------------------------------------
// State

SimState init_state(const RunConfig& config, const RunInputs& inputs) {
  config.validate();
  SimState state;
  Rng init_rng = Rng(config.seed).split("init");
  const nn::Model initial = nn::init_model(config.shape, init_rng);
  const std::size_t p = config.shape.param_count();
  state.global = initial;
  const bool attacking = config.attack != AttackKind::kNone;
  for (int id = 0; id < config.topology.n_users; ++id) {
    UserState u;
    u.id = id;
    u.model = initial;
    u.optimizer = nn::OptimizerState::make(config.optimizer, config.learning_rate, p);
    u.local_data = inputs.train.subset(inputs.partition.assignments[static_cast<std::size_t>(id)],
                                       "user" + std::to_string(id));
    u.eval_data = capped_subset(u.local_data, config.aggregator.eval_set_size,
                                Rng(config.seed).split("user_eval").split(static_cast<std::uint64_t>(id)),
                                "user_eval");
    u.is_adversary = attacking && std::find(config.adversary_ids.begin(), config.adversary_ids.end(), id) !=
                                      config.adversary_ids.end();
    if (!u.is_adversary && u.local_data.empty()) {
      throw ConfigError("data.partition: honest user " + std::to_string(id) + " has no data");
    }
    state.users.push_back(std::move(u));
  }
  state.target = adv::build_target(config.target_kind, config.shape, initial.params, config.target_overrides);
  return state;
}

const nn::Model& honest_model(const SimState& state, const RunConfig& config, int user_id) {
  return config.topology.server_present() ? state.global : state.users[static_cast<std::size_t>(user_id)].model;
}

double distance_to_target(const std::vector<UserState>& users, const ParamVector& target,
                          const nn::Model* global) {
  double sum = 0.0;
  int count = 0;
  for (const auto& u : users) {
    if (u.is_adversary) continue;
    sum += distance(global != nullptr ? global->params : u.model.params, target);
    ++count;
  }
  if (count == 0) throw PreconditionError("distance_to_target: no honest users");
  return sum / count;
}

// ---------------------------------------------------------------------------
// Epoch

EpochTrace run_epoch(SimState& state, const RunConfig& config, const RunInputs& inputs, int epoch) {
  const int n = config.topology.n_users;
  const bool star = config.topology.server_present();
  const std::size_t p = config.shape.param_count();
  const agg::AggregatorSpec& spec = config.aggregator;
  const int num_adv = static_cast<int>(std::count_if(state.users.begin(), state.users.end(),
                                                     [](const UserState& u) { return u.is_adversary; }));
  EpochTrace trace;
  trace.epoch = epoch;
  EpochCounters counters;

  // 1. Local training.
  const Rng train_root = Rng(config.seed).split("train");
  std::map<int, ParamVector> honest;
  double batch_loss = 0.0;
  for (auto& u : state.users) {
    if (u.is_adversary) continue;
    const nn::Model& start = star ? state.global : u.model;
    auto r = nn::local_train_step(start, u.optimizer, u.local_data, config.batch_size,
                                  train_root.split(static_cast<std::uint64_t>(u.id)).split(static_cast<std::uint64_t>(epoch)),
                                  config.local_steps);
    u.optimizer = std::move(r.optimizer);
    batch_loss += r.mean_batch_loss;
    honest.emplace(u.id, std::move(r.update));
  }
  const double honest_count = static_cast<double>(honest.size());
  trace.metrics["local_batch_loss"] = batch_loss / honest_count;

  // 2. What the adversary sees.
  std::map<int, ParamVector> observed;
  if (config.observation == Observation::kLastMover) {
    observed = honest;
  } else if (!state.previous_updates.empty()) {
    observed = state.previous_updates;
  } else {
    for (const auto& [id, u] : honest) observed.emplace(id, ParamVector::zeros(p));
  }

  auto fit = [&](const ParamVector& crafted, std::vector<ParamVector> received,
                 const std::vector<std::size_t>& slots, const nn::Model& model, const Dataset& eval_set) {
    if (!config.fit_attack || !filters_updates(spec.kind)) return crafted;
    ParamVector anchor = ParamVector::zeros(p);
    if (spec.kind != EvaluatorKind::kRoflNorm) {
      for (std::size_t k = 0; k < received.size(); ++k) {
        if (std::find(slots.begin(), slots.end(), k) == slots.end()) anchor += received[k];
      }
      anchor /= static_cast<double>(received.size() - slots.size());
    }
    AcceptanceProbe probe(spec, std::move(received), slots, &model, &eval_set);
    auto fitted = adv::fit_to_acceptance(crafted, anchor, std::ref(probe), 40);
    counters.attack_scale_sum += fitted.scale;
    counters.attack_scale_count += 1;
    return fitted.update;
  };

  auto wrap = [&](auto&& fn) {
    try {
      return fn();
    } catch (const PreconditionError& e) {
      throw PreconditionError("epoch " + std::to_string(epoch) + ": " + e.what());
    }
  };

  // 3. Communication and aggregation.
  if (star) {
    std::vector<ParamVector> received(static_cast<std::size_t>(n));
    std::vector<std::size_t> slots;
    for (const auto& u : state.users) {
      if (u.is_adversary) slots.push_back(static_cast<std::size_t>(u.id));
      else received[static_cast<std::size_t>(u.id)] = honest.at(u.id);
    }
    if (!slots.empty()) {
      ParamVector crafted = ParamVector::zeros(p);
      if (has_target(config.attack)) {
        adv::AdversaryView view;
        view.visible_updates = observed;
        view.epoch = epoch;
        crafted = adv::state_override(view, state.target - state.global.params, n, num_adv);
      }
      // Honest slots carry the adversary's estimate while fitting.
      std::vector<ParamVector> estimate = received;
      for (const auto& [id, u] : observed) estimate[static_cast<std::size_t>(id)] = u;
      for (std::size_t s : slots) estimate[s] = crafted;
      crafted = fit(crafted, std::move(estimate), slots, state.global, inputs.server_eval);
      for (std::size_t s : slots) received[s] = crafted;
    }
    agg::AggregationContext ctx{received, nullptr, &state.global, &inputs.server_eval};
    auto outcome = wrap([&] { return agg::aggregate(spec, ctx); });
    for (std::size_t s : slots) {
      counters.adversary_slots += 1;
      counters.adversary_accepted += outcome.accepted[s] ? 1 : 0;
    }
    if (outcome.empty_acceptance) {
      counters.empty_acceptance += 1;
      trace.notes.push_back("server: no update accepted, zero aggregate applied");
    }
    state.global.params += outcome.aggregate;
    for (std::size_t k = 0; k < received.size(); ++k) trace.updates.emplace(static_cast<int>(k), std::move(received[k]));
    trace.outcomes.emplace("server", std::move(outcome));
  } else {
    // In model exchange a peer transmits its freshly trained model; victim i
    // handles it as the offset from its own current model. With synchronized
    // models both modes coincide.
    const bool models = config.exchange == Exchange::kModels;
    auto transmitted = [&](const std::map<int, ParamVector>& updates) {
      std::map<int, ParamVector> out;
      for (const auto& [id, u] : updates) {
        out.emplace(id, models ? state.users[static_cast<std::size_t>(id)].model.params + u : u);
      }
      return out;
    };
    const std::map<int, ParamVector> sent = transmitted(honest);
    const std::map<int, ParamVector> sent_observed = transmitted(observed);
    if (epoch == 1) state.initial_updates = sent;

    std::vector<ParamVector> new_aggregates(static_cast<std::size_t>(n));
    for (auto& victim : state.users) {
      if (victim.is_adversary) continue;
      const int i = victim.id;
      const ParamVector& own = honest.at(i);
      auto relative = [&](const ParamVector& v) { return models ? v - victim.model.params : v; };

      // Observed honest neighbors of i, and the victim's own update as the
      // adversary estimates it.
      adv::AdversaryView view;
      view.epoch = epoch;
      for (const auto& [id, v] : sent_observed) {
        if (id != i) view.visible_updates.emplace(id, relative(v));
      }
      view.victim_own_update = observed.at(i);

      ParamVector crafted;
      if (num_adv > 0) {
        switch (config.attack) {
          case AttackKind::kStateOverride: {
            adv::AdversaryView all = view;
            all.visible_updates.emplace(i, *view.victim_own_update);
            crafted = adv::state_override(all, state.target - victim.model.params, n, num_adv);
            break;
          }
          case AttackKind::kStateOverrideScc: {
            std::vector<ParamVector> others;
            for (const auto& [id, u] : view.visible_updates) others.push_back(u);
            double delta = spec.delta;
            if (spec.delta_policy == agg::DeltaPolicy::kDynamicVariance && !others.empty()) {
              delta = agg::dynamic_delta(*view.victim_own_update, others);
            }
            crafted = state.target - victim.model.params;
            crafted.add_scaled(adv::state_override_scc(view, delta), 1.0 / num_adv);
            break;
          }
          case AttackKind::kDissensus:
            crafted = relative(adv::dissensus(state.initial_updates, i, n - 1));
            break;
          case AttackKind::kNone:
            break;
        }
      }

      // Received list in ascending sender id; SCC keeps own separate.
      const bool scc = spec.kind == EvaluatorKind::kScc;
      std::vector<ParamVector> received;
      std::vector<ParamVector> estimate;  // honest slots as the adversary sees them
      std::vector<std::size_t> slots;
      std::size_t own_pos = 0;
      for (const auto& u : state.users) {
        if (u.id == i) {
          if (scc) continue;
          own_pos = received.size();
          received.push_back(own);
          estimate.push_back(observed.at(i));
        } else if (u.is_adversary) {
          slots.push_back(received.size());
          received.push_back(crafted);
          estimate.push_back(crafted);
        } else {
          received.push_back(relative(sent.at(u.id)));
          estimate.push_back(view.visible_updates.at(u.id));
        }
      }
      if (!slots.empty() && !scc) {
        crafted = fit(crafted, std::move(estimate), slots, victim.model, victim.eval_data);
        for (std::size_t s : slots) received[s] = crafted;
      }
      std::vector<ParamVector> others;
      for (std::size_t k = 0; k < received.size(); ++k) {
        if (scc || k != own_pos) others.push_back(received[k]);
      }

      const double dd = others.empty() ? 0.0 : agg::dynamic_delta(own, others);
      counters.dynamic_delta_sum += dd;
      counters.dynamic_delta_count += 1;

      agg::AggregatorSpec local_spec = spec;
      if (spec.delta_policy == agg::DeltaPolicy::kDynamicVariance) local_spec.delta = dd;
      agg::AggregationContext ctx{received, &own, &victim.model, &victim.eval_data};
      auto outcome = wrap([&] { return agg::aggregate(local_spec, ctx); });

      for (std::size_t s : slots) {
        counters.adversary_slots += 1;
        counters.adversary_accepted += outcome.accepted[s] ? 1 : 0;
        if (scc && outcome.clipped[s]) counters.crafted_clipped += 1;
      }
      if (scc) {
        counters.clipped += static_cast<double>(std::count(outcome.clipped.begin(), outcome.clipped.end(), true));
        counters.received += static_cast<double>(outcome.clipped.size());
      }
      if (outcome.empty_acceptance) {
        counters.empty_acceptance += 1;
        trace.notes.push_back("user " + std::to_string(i) + ": no update accepted, zero aggregate applied");
      }
      new_aggregates[static_cast<std::size_t>(i)] = outcome.aggregate;
      trace.outcomes.emplace("user:" + std::to_string(i), std::move(outcome));
    }
    for (auto& u : state.users) {
      if (!u.is_adversary) u.model.params += new_aggregates[static_cast<std::size_t>(u.id)];
    }
    for (const auto& [id, u] : sent) trace.updates.emplace(id, u);
  }
  state.previous_updates = std::move(honest);

  // 4. Metrics.
  const bool attacking = num_adv > 0;
  if (attacking && has_target(config.attack)) {
    trace.metrics["distance_to_target"] = distance_to_target(state.users, state.target, star ? &state.global : nullptr);
  }
  if (!star) trace.metrics["dynamic_delta_mean"] = counters.dynamic_delta_sum / counters.dynamic_delta_count;
  if (spec.kind == EvaluatorKind::kScc && counters.received > 0) {
    trace.metrics["clipped_fraction"] = counters.clipped / counters.received;
  }
  if (counters.adversary_slots > 0) {
    trace.metrics["adversary_accept_rate"] = counters.adversary_accepted / counters.adversary_slots;
    if (spec.kind == EvaluatorKind::kScc) trace.metrics["crafted_clipped"] = counters.crafted_clipped;
  }
  if (counters.attack_scale_count > 0) trace.metrics["attack_scale"] = counters.attack_scale_sum / counters.attack_scale_count;
  if (filters_updates(spec.kind)) trace.metrics["empty_acceptance"] = counters.empty_acceptance;

  const bool eval_epoch = epoch == 1 || epoch % config.eval_every == 0 || epoch == config.epochs;
  if (eval_epoch) {
    const nn::OutputHead head = config.shape.output_head;
    const bool classification = head != nn::OutputHead::kLinearMse;
    const nn::Loss train_loss = nn::default_loss(head);
    double quality = 0.0;
    double loss = 0.0;
    int count = 0;
    for (const auto& u : state.users) {
      if (u.is_adversary) continue;
      const nn::Model& m = honest_model(state, config, u.id);
      quality += nn::evaluate(m, inputs.validation_eval, classification ? nn::Metric::kAccuracy : nn::Metric::kRmse);
      loss += nn::mean_loss(m, inputs.train_eval, train_loss);
      ++count;
      if (star) break;  // every honest user holds the global model
    }
    if (classification) {
      trace.metrics["accuracy"] = quality / count;
      trace.metrics["error_rate"] = 1.0 - quality / count;
    } else {
      trace.metrics["rmse"] = quality / count;
    }
    trace.metrics["train_loss"] = loss / count;
  }
  return trace;
}

RunResult run(const RunConfig& config, const RunInputs& inputs, const RunOptions& options) {
  RunResult result;
  result.final_state = init_state(config, inputs);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochTrace trace = run_epoch(result.final_state, config, inputs, epoch);
    if (options.observer) options.observer(trace);
    if (!options.keep_vectors) {
      trace.updates.clear();
      for (auto& [key, outcome] : trace.outcomes) outcome.aggregate = ParamVector();
    }
    result.traces.push_back(std::move(trace));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(TopologyKind k) { return k == TopologyKind::kStar ? "star" : "complete"; }

std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::kMnist: return "mnist";
    case DatasetKind::kPimaSynthetic: return "pima_synthetic";
    case DatasetKind::kCsv: return "csv";
  }
  return "?";
}

std::string_view to_string(PartitionKind k) {
  switch (k) {
    case PartitionKind::kIid: return "iid";
    case PartitionKind::kByLabel: return "by_label";
    case PartitionKind::kSizes: return "sizes";
  }
  return "?";
}

std::string_view to_string(Exchange e) { return e == Exchange::kModels ? "models" : "updates"; }

Exchange parse_exchange(std::string_view s) {
  if (s == "models") return Exchange::kModels;
  if (s == "updates") return Exchange::kUpdates;
  throw ConfigError("unknown exchange '" + std::string(s) + "' (models, updates)");
}

std::string_view to_string(Observation o) {
  return o == Observation::kLastMover ? "last_mover" : "previous_epoch";
}

TopologyKind parse_topology(std::string_view s) {
  if (s == "star") return TopologyKind::kStar;
  if (s == "complete") return TopologyKind::kComplete;
  throw ConfigError("unknown topology '" + std::string(s) + "' (star, complete)");
}

DatasetKind parse_dataset_kind(std::string_view s) {
  for (auto k : {DatasetKind::kMnist, DatasetKind::kPimaSynthetic, DatasetKind::kCsv}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown dataset '" + std::string(s) + "' (mnist, pima_synthetic, csv)");
}

PartitionKind parse_partition_kind(std::string_view s) {
  for (auto k : {PartitionKind::kIid, PartitionKind::kByLabel, PartitionKind::kSizes}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown partition '" + std::string(s) + "' (iid, by_label, sizes)");
}

Observation parse_observation(std::string_view s) {
  if (s == "last_mover") return Observation::kLastMover;
  if (s == "previous_epoch") return Observation::kPreviousEpoch;
  throw ConfigError("unknown observation '" + std::string(s) + "' (last_mover, previous_epoch)");
}

}  // namespace byzlab::sim
