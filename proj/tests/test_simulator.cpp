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
#include <gtest/gtest.h>

#include "byzlab/error.hpp"
#include "byzlab/simulator.hpp"
#include "support.hpp"

namespace byzlab::sim {
namespace {

using byzlab::testing::relative_error;

// Small tabular run: seconds, not minutes.
RunConfig small_config() {
  RunConfig c;
  c.topology = {TopologyKind::kStar, 5};
  c.data.dataset = DatasetKind::kPimaSynthetic;
  c.data.train_size = 614;
  c.shape = nn::ModelShape{{8, 8, 2}, nn::Activation::kRelu, nn::OutputHead::kSoftmaxXent};
  c.batch_size = 16;
  c.epochs = 3;
  c.train_eval_size = 0;
  return c;
}

std::string validate_message(const RunConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Validate, MessagesNameTheKey) {
  RunConfig c = small_config();
  EXPECT_EQ(validate_message(c), "");
  c.aggregator.delta = -1;
  EXPECT_EQ(validate_message(c).rfind("aggregator.delta:", 0), 0u);
  c = small_config();
  c.topology.n_users = 0;
  EXPECT_EQ(validate_message(c).rfind("topology.n_users:", 0), 0u);
  c = small_config();
  c.attack = adv::AttackKind::kDissensus;
  c.adversary_ids = {4};
  EXPECT_EQ(validate_message(c).rfind("attack.kind:", 0), 0u);
  c = small_config();
  c.aggregator.kind = agg::EvaluatorKind::kScc;
  EXPECT_EQ(validate_message(c).rfind("aggregator.kind:", 0), 0u);
  c = small_config();
  c.attack = adv::AttackKind::kStateOverride;
  EXPECT_EQ(validate_message(c).rfind("attack.adversary_ids:", 0), 0u);
  c.adversary_ids = {5};
  EXPECT_EQ(validate_message(c).rfind("attack.adversary_ids:", 0), 0u);
  c = small_config();
  c.data.partition = PartitionKind::kSizes;
  c.data.sizes = {10, 10};
  EXPECT_EQ(validate_message(c).rfind("data.sizes:", 0), 0u);
  c = small_config();
  c.aggregator.kind = agg::EvaluatorKind::kMultiKrum;
  c.aggregator.f = 3;
  EXPECT_EQ(validate_message(c).rfind("aggregator.f:", 0), 0u);
}

TEST(Inputs, PartitionCoversTrainSet) {
  const RunConfig c = small_config();
  const RunInputs in = build_inputs(c);
  EXPECT_EQ(in.train.size(), 614u);
  EXPECT_EQ(in.validation.size(), 154u);
  EXPECT_EQ(in.partition.users(), 5u);
  std::size_t total = 0;
  for (const auto& a : in.partition.assignments) total += a.size();
  EXPECT_EQ(total, 614u);
}

// With mean aggregation the override lands exactly on the target, every
// epoch, in both topologies.
TEST(Run, StateOverrideUnderMeanHitsTargetEveryEpoch) {
  for (auto kind : {TopologyKind::kStar, TopologyKind::kComplete}) {
    RunConfig c = small_config();
    c.topology.kind = kind;
    c.attack = adv::AttackKind::kStateOverride;
    c.adversary_ids = {2};
    c.target_kind = adv::TargetKind::kWeightOverride;
    c.target_overrides = {{0, 3.0}, {7, -2.0}};
    const RunInputs in = build_inputs(c);
    SimState state = init_state(c, in);
    for (int epoch = 1; epoch <= 3; ++epoch) {
      run_epoch(state, c, in, epoch);
      for (const auto& u : state.users) {
        if (u.is_adversary) continue;
        EXPECT_LE(relative_error(honest_model(state, c, u.id).params, state.target), 1e-9)
            << to_string(kind) << " epoch " << epoch << " user " << u.id;
      }
    }
  }
}

TEST(Run, SameSeedSameTraceDifferentSeedDifferentTrace) {
  RunConfig c = small_config();
  c.aggregator.kind = agg::EvaluatorKind::kMultiKrum;
  c.aggregator.f = 1;
  c.attack = adv::AttackKind::kStateOverride;
  c.adversary_ids = {4};
  const auto a = run(c, build_inputs(c));
  const auto b = run(c, build_inputs(c));
  ASSERT_EQ(a.traces.size(), 3u);
  for (std::size_t e = 0; e < a.traces.size(); ++e) EXPECT_EQ(a.traces[e].metrics, b.traces[e].metrics);
  EXPECT_EQ(a.final_state.global.params, b.final_state.global.params);
  c.seed = 2;
  const auto d = run(c, build_inputs(c));
  EXPECT_NE(a.final_state.global.params, d.final_state.global.params);
}

TEST(Run, MetricsFollowEvalSchedule) {
  RunConfig c = small_config();
  c.epochs = 5;
  c.eval_every = 2;
  const auto r = run(c, build_inputs(c));
  for (const auto& t : r.traces) {
    const bool due = t.epoch == 1 || t.epoch % 2 == 0 || t.epoch == 5;
    EXPECT_EQ(t.metrics.count("accuracy") == 1, due) << t.epoch;
  }
}

TEST(Run, SccRecordsDynamicDeltaAndClipping) {
  RunConfig c = small_config();
  c.topology.kind = TopologyKind::kComplete;
  c.aggregator.kind = agg::EvaluatorKind::kScc;
  c.aggregator.delta_policy = agg::DeltaPolicy::kDynamicVariance;
  c.attack = adv::AttackKind::kDissensus;
  c.adversary_ids = {4};
  const auto r = run(c, build_inputs(c));
  for (const auto& t : r.traces) {
    ASSERT_TRUE(t.metrics.count("dynamic_delta_mean"));
    EXPECT_GT(t.metrics.at("dynamic_delta_mean"), 0.0);
    EXPECT_EQ(t.outcomes.size(), 4u);  // one per honest user
  }
}

// Dissensus enlarges the per-user dynamic delta relative to benign peers.
TEST(Run, DissensusInflatesDynamicDelta) {
  RunConfig c = small_config();
  c.topology = {TopologyKind::kComplete, 6};
  c.exchange = Exchange::kModels;
  c.aggregator.kind = agg::EvaluatorKind::kScc;
  c.aggregator.delta_policy = agg::DeltaPolicy::kDynamicVariance;
  c.adversary_ids = {5};
  c.epochs = 3;
  const auto benign = run(c, build_inputs(c));
  c.attack = adv::AttackKind::kDissensus;
  const auto attacked = run(c, build_inputs(c));
  EXPECT_GT(attacked.traces.back().metrics.at("dynamic_delta_mean"),
            benign.traces.back().metrics.at("dynamic_delta_mean"));
}

TEST(Run, RoflEmptyAcceptanceIsRecorded) {
  RunConfig c = small_config();
  c.aggregator.kind = agg::EvaluatorKind::kRoflNorm;
  c.aggregator.delta = 1e-12;
  c.epochs = 1;
  const auto r = run(c, build_inputs(c));
  EXPECT_EQ(r.traces[0].metrics.at("empty_acceptance"), 1.0);
  EXPECT_FALSE(r.traces[0].notes.empty());
}

TEST(Run, ZeroEpochsGiveNoTraces) {
  RunConfig c = small_config();
  c.epochs = 0;
  EXPECT_TRUE(run(c, build_inputs(c)).traces.empty());
}

// With mean aggregation and no attack both topologies compute the same mean.
TEST(Run, StarAndCompleteAgreeUnderBenignMean) {
  for (auto exchange : {Exchange::kUpdates, Exchange::kModels}) {
    RunConfig star = small_config();
    RunConfig complete = star;
    complete.topology.kind = TopologyKind::kComplete;
    complete.exchange = exchange;
    const RunInputs in = build_inputs(star);
    SimState a = init_state(star, in);
    SimState b = init_state(complete, in);
    for (int epoch = 1; epoch <= star.epochs; ++epoch) {
      run_epoch(a, star, in, epoch);
      run_epoch(b, complete, in, epoch);
      for (const auto& u : b.users) {
        EXPECT_LE(distance(honest_model(b, complete, u.id).params, a.global.params), 1e-9)
            << to_string(exchange) << " epoch " << epoch << " user " << u.id;
      }
    }
  }
}

TEST(Run, TargetIsIrrelevantWithoutAttack) {
  RunConfig c = small_config();
  const auto a = run(c, build_inputs(c));
  c.target_kind = adv::TargetKind::kWeightOverride;
  c.target_overrides = {{0, 5.0}};
  const auto b = run(c, build_inputs(c));
  ASSERT_EQ(a.traces.size(), b.traces.size());
  for (std::size_t e = 0; e < a.traces.size(); ++e) {
    auto ma = a.traces[e].metrics;
    auto mb = b.traces[e].metrics;
    ma.erase("distance_to_target");
    mb.erase("distance_to_target");
    EXPECT_EQ(ma, mb);
  }
  EXPECT_EQ(a.final_state.global.params, b.final_state.global.params);
}

TEST(Names, RoundTrip) {
  for (auto e : {Exchange::kUpdates, Exchange::kModels}) EXPECT_EQ(parse_exchange(to_string(e)), e);
  for (auto p : {PartitionKind::kIid, PartitionKind::kByLabel, PartitionKind::kSizes}) {
    EXPECT_EQ(parse_partition_kind(to_string(p)), p);
  }
  EXPECT_THROW(parse_topology("ring"), ConfigError);
}

}  // namespace
}  // namespace byzlab::sim
