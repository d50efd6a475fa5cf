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
#include "byzlab/presets.hpp"

#include <string>

#include "byzlab/csv.hpp"
#include "byzlab/error.hpp"

namespace byzlab::cli {

namespace {

using agg::EvaluatorKind;
using sim::TopologyKind;
using AttackKind = adv::AttackKind;

// 20 users on the MNIST subset, the last two adversarial.
void mnist_defaults(ExperimentConfig& c) {
  sim::RunConfig& r = c.run;
  r.topology = {TopologyKind::kStar, 20};
  r.adversary_ids = {18, 19};
  r.data = sim::DataSpec{};
  r.epochs = 50;
  r.eval_every = 1;
}

Variant scc_variant(const sim::RunConfig& base, std::string name, bool attacked) {
  Variant v{std::move(name), base};
  v.config.topology.kind = TopologyKind::kComplete;
  v.config.aggregator.kind = EvaluatorKind::kScc;
  v.config.attack = attacked ? AttackKind::kStateOverrideScc : AttackKind::kNone;
  return v;
}

Variant mkrum_variant(const sim::RunConfig& base) {
  Variant v{"mkrum", base};
  v.config.topology.kind = TopologyKind::kStar;
  v.config.aggregator.kind = EvaluatorKind::kMultiKrum;
  if (v.config.aggregator.f <= 0) v.config.aggregator.f = agg::multi_krum_default_f(base.topology.n_users);
  v.config.attack = AttackKind::kStateOverride;
  return v;
}

Variant rofl_variant(const sim::RunConfig& base) {
  Variant v{"rofl", base};
  v.config.topology.kind = TopologyKind::kStar;
  v.config.aggregator.kind = EvaluatorKind::kRoflNorm;
  v.config.attack = AttackKind::kStateOverride;
  return v;
}

std::vector<Variant> three_aggregators(const ExperimentConfig& c) {
  return {scc_variant(c.run, "scc", true), mkrum_variant(c.run), rofl_variant(c.run)};
}

void knowledge_defaults(ExperimentConfig& c) {
  sim::RunConfig& r = c.run;
  r.data = sim::DataSpec{};
  r.data.train_size = 3000;
  r.data.validation_size = 1000;
  r.shape = nn::ModelShape{{784, 32, 10}, nn::Activation::kRelu, nn::OutputHead::kSoftmaxXent};
  r.learning_rate = 0.001;
  r.epochs = 20;
  c.label_degrees = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  c.fraction_degrees = {0.001, 0.01, 0.1, 0.25, 0.5, 1.0};
}

std::vector<Preset> build() {
  std::vector<Preset> out;

  Preset baseline;
  baseline.name = "baseline-mnist-iid";
  baseline.figure = "baseline";
  baseline.description = "benign mean aggregation, IID MNIST subset, 20 users";
  baseline.defaults = [](ExperimentConfig& c) {
    mnist_defaults(c);
    c.run.adversary_ids.clear();
    c.run.epochs = 30;
  };
  baseline.variants = [](const ExperimentConfig& c) {
    Variant v{"mean", c.run};
    v.config.aggregator.kind = EvaluatorKind::kMean;
    v.config.attack = AttackKind::kNone;
    return std::vector<Variant>{v};
  };
  out.push_back(baseline);

  Preset iid;
  iid.name = "fig2-mnist-iid";
  iid.figure = "fig2";
  iid.description = "state override against SCC, Multi-KRUM and RoFL, IID MNIST subset";
  iid.defaults = mnist_defaults;
  iid.variants = three_aggregators;
  out.push_back(iid);

  Preset noniid = iid;
  noniid.name = "fig2-mnist-noniid";
  noniid.description = "state override against SCC, Multi-KRUM and RoFL, MNIST subset split by label";
  noniid.defaults = [](ExperimentConfig& c) {
    mnist_defaults(c);
    c.run.data.partition = sim::PartitionKind::kByLabel;
  };
  out.push_back(noniid);

  Preset sweep;
  sweep.name = "fig3-delta-sweep";
  sweep.figure = "fig3";
  sweep.description = "SCC with delta 0.5, 1 and 5, benign and under the clipping-aware override";
  sweep.defaults = [](ExperimentConfig& c) {
    mnist_defaults(c);
    c.run.topology.kind = TopologyKind::kComplete;
    c.run.aggregator.kind = EvaluatorKind::kScc;
    c.run.attack = AttackKind::kStateOverrideScc;
  };
  sweep.variants = [](const ExperimentConfig& c) {
    std::vector<Variant> v;
    for (double delta : {0.5, 1.0, 5.0}) {
      const std::string tag = "d" + csv::format_double(delta);
      for (bool attacked : {false, true}) {
        Variant x = scc_variant(c.run, tag + (attacked ? "-attack" : "-benign"), attacked);
        x.config.aggregator.delta = delta;
        v.push_back(std::move(x));
      }
    }
    return v;
  };
  out.push_back(sweep);

  Preset dissensus;
  dissensus.name = "fig5-dissensus";
  dissensus.figure = "fig5";
  dissensus.description = "SCC with per-user dynamic delta, benign and under dissensus";
  dissensus.defaults = [](ExperimentConfig& c) {
    mnist_defaults(c);
    sim::RunConfig& r = c.run;
    r.topology.kind = TopologyKind::kComplete;
    r.exchange = sim::Exchange::kModels;
    r.aggregator.kind = EvaluatorKind::kScc;
    r.aggregator.delta_policy = agg::DeltaPolicy::kDynamicVariance;
    r.attack = AttackKind::kDissensus;
    r.learning_rate = 0.003;
    r.epochs = 30;
    r.eval_every = 5;
  };
  dissensus.variants = [](const ExperimentConfig& c) {
    Variant base{"baseline", c.run};
    base.config.attack = AttackKind::kNone;
    Variant attack{"attack", c.run};
    attack.config.attack = AttackKind::kDissensus;
    return std::vector<Variant>{base, attack};
  };
  out.push_back(dissensus);

  Preset p2p;
  p2p.name = "fig6-knowledge-p2p";
  p2p.figure = "fig6";
  p2p.description = "decision quality of a peer vs its learning potential, RD-SVM and ERR";
  p2p.kind = PresetKind::kKnowledge;
  p2p.defaults = knowledge_defaults;
  p2p.subject = TopologyKind::kComplete;
  out.push_back(p2p);

  Preset server = p2p;
  server.name = "fig7-knowledge-server";
  server.figure = "fig7";
  server.description = "decision quality of the server vs its learning potential, RD-SVM and ERR";
  server.subject = TopologyKind::kStar;
  out.push_back(server);

  Preset health;
  health.name = "fig8-health";
  health.figure = "fig8";
  health.description = "override to the all-zero model on the imbalanced diabetes task, 10 users";
  health.dump_predictions = true;
  health.defaults = [](ExperimentConfig& c) {
    sim::RunConfig& r = c.run;
    r.topology = {TopologyKind::kStar, 10};
    r.adversary_ids = {8, 9};
    r.data = sim::DataSpec{};
    r.data.dataset = sim::DatasetKind::kPimaSynthetic;
    r.data.train_size = 614;
    r.data.partition = sim::PartitionKind::kSizes;
    r.data.sizes = {39, 39, 39, 59, 59, 59, 80, 80, 80, 80};
    r.shape = nn::ModelShape{{8, 16, 8, 2}, nn::Activation::kRelu, nn::OutputHead::kSoftmaxXent};
    r.learning_rate = 1e-5;
    r.batch_size = 10;
    r.epochs = 100;
    r.eval_every = 1;
    r.train_eval_size = 0;
  };
  health.variants = three_aggregators;
  out.push_back(health);

  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = build();
  return table;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string names;
  for (const auto& p : presets()) names += (names.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset '" + std::string(name) + "' (available: " + names + ")");
}

std::vector<Variant> expand(const ExperimentConfig& config) {
  const Preset& p = find_preset(config.preset);
  if (p.kind != PresetKind::kTraining) return {};
  auto variants = p.variants(config);
  for (auto& v : variants) v.config.seed = config.seed;
  return variants;
}

}  // namespace byzlab::cli
