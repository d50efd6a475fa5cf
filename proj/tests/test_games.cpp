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

#include <cmath>

#include "byzlab/error.hpp"
#include "byzlab/games.hpp"
#include "support.hpp"

namespace byzlab::games {
namespace {

using byzlab::testing::random_dataset;
using byzlab::testing::random_vectors;

// Without ties Spearman's rho is 1 - 6 sum d^2 / (n (n^2 - 1)).
TEST(Spearman, MatchesClosedFormWithoutTies) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.below(10);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    auto ranks = [](const std::vector<double>& v) {
      std::vector<double> r(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        r[i] = 1;
        for (double w : v) r[i] += w < v[i];
      }
      return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(spearman(x, y), 1 - 6 * d2 / (nn * (nn * nn - 1)), 1e-12);
  }
}

TEST(Spearman, TiesAndDegenerateSeries) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{10, 8, 6, 4, 2};
  EXPECT_DOUBLE_EQ(spearman(a, a), 1.0);
  EXPECT_DOUBLE_EQ(spearman(a, b), -1.0);
  // Ranks {1, 2.5, 2.5, 4} against {1, 2, 3, 4}: rho = 4.5 / sqrt(4.5 * 5).
  const std::vector<double> t{1, 2, 2, 3}, u{1, 2, 3, 4};
  EXPECT_NEAR(spearman(t, u), 4.5 / std::sqrt(4.5 * 5.0), 1e-12);
  EXPECT_TRUE(std::isnan(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3})));
  EXPECT_THROW(spearman(a, t), DimensionError);
}

TEST(Summarize, CountsAndRates) {
  std::vector<GameRecord> r;
  auto add = [&](bool truth, bool decision, int times) {
    for (int i = 0; i < times; ++i) r.push_back({1, i, truth, decision, 0, 0});
  };
  add(true, true, 5);    // tp
  add(true, false, 1);   // fn
  add(false, true, 2);   // fp
  add(false, false, 2);  // tn
  const auto s = summarize(r);
  EXPECT_EQ(s.counts.tp, 5u);
  EXPECT_EQ(s.counts.fn, 1u);
  EXPECT_EQ(s.counts.fp, 2u);
  EXPECT_EQ(s.counts.tn, 2u);
  EXPECT_DOUBLE_EQ(s.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(s.fpr, 0.5);
  EXPECT_EQ(summarize(std::vector<GameRecord>{}).fpr, 0.0);
}

TEST(ControlSizes, LinearRamp) {
  GameConfig c;
  c.control_users = 3;
  c.control_min_fraction = 0.1;
  c.control_max_fraction = 0.3;
  EXPECT_EQ(control_sizes(c, 1000), (std::vector<std::size_t>{100, 200, 300}));
  c.control_users = 1;
  EXPECT_EQ(control_sizes(c, 1000), (std::vector<std::size_t>{100}));
}

struct ScoreFixture : ::testing::Test {
  Rng rng{5};
  nn::Model model;
  Dataset data;
  std::vector<ParamVector> updates;
  void SetUp() override {
    model = nn::init_model(nn::ModelShape{{3, 4, 3}}, rng);
    data = random_dataset(rng, 80, 3, 3);
    updates = random_vectors(rng, 4, model.params.size(), 0.4);
  }
};

TEST_F(ScoreFixture, BehaviorScoreDelegatesToEvaluators) {
  for (std::size_t k = 0; k < updates.size(); ++k) {
    EXPECT_DOUBLE_EQ(behavior_score(agg::EvaluatorKind::kRdSvmHinge, updates, k, model, data),
                     agg::rd_svm_evaluate(updates[k], model, data));
    EXPECT_DOUBLE_EQ(behavior_score(agg::EvaluatorKind::kErrRejection, updates, k, model, data),
                     agg::err_scores(updates, model, data)[k]);
  }
  EXPECT_THROW(behavior_score(agg::EvaluatorKind::kScc, updates, 0, model, data), PreconditionError);
}

TEST_F(ScoreFixture, GroundTruthIsScoreBelowDelta) {
  for (std::size_t k = 0; k < updates.size(); ++k) {
    const double s = agg::rd_svm_evaluate(updates[k], model, data);
    EXPECT_EQ(ground_truth_label(updates, k, model, agg::EvaluatorKind::kRdSvmHinge, data, 0.0), s < 0.0);
    EXPECT_EQ(ground_truth_label(updates[k], model, agg::EvaluatorKind::kRdSvmHinge, data, 0.0), s < 0.0);
  }
  EXPECT_EQ(default_delta(agg::EvaluatorKind::kRdSvmHinge), 0.0);
  EXPECT_GT(default_delta(agg::EvaluatorKind::kErrRejection), 0.0);
  EXPECT_LT(default_delta(agg::EvaluatorKind::kErrRejection), 1e-6);
}

TEST(LearningPotential, FullKnowledgeHasNoGap) {
  Rng rng(9);
  const Dataset all = random_dataset(rng, 120, 4, 2);
  const Dataset val = random_dataset(rng, 60, 4, 2);
  const nn::ModelShape shape{{4, 6, 2}};
  const auto same = learning_potential(all, all, val, shape, TrainBudget{}, 1);
  EXPECT_EQ(same.potential, 0.0);
  EXPECT_DOUBLE_EQ(same.potential, same.acc_all - same.acc_local);
}

GameConfig tiny_game() {
  GameConfig c;
  c.data.train_size = 300;
  c.data.validation_size = 100;
  c.shape = nn::ModelShape{{784, 8, 10}};
  c.training.epochs = 2;
  c.potential_epochs = 1;
  c.control_users = 3;
  return c;
}

TEST(Validate, MessagesNameTheKey) {
  GameConfig c = tiny_game();
  EXPECT_NO_THROW(c.validate());
  c.evaluators = {agg::EvaluatorKind::kMultiKrum};
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("games.evaluators:", 0), 0u);
  }
  c = tiny_game();
  c.control_max_fraction = 0.9;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Sweep, RecordsEveryControlUpdateEachEpoch) {
  GameConfig c = tiny_game();
  const std::vector<KnowledgePoint> k{{data::KnowledgeMode::kLabelsPrefix, 2},
                                      {data::KnowledgeMode::kIidFraction, 1.0}};
  const auto sweep = play_rind_sweep(c, k);
  ASSERT_EQ(sweep.size(), 2u);
  for (const auto& p : sweep) {
    ASSERT_EQ(p.reports.size(), c.evaluators.size());
    for (std::size_t e = 0; e < p.reports.size(); ++e) {
      EXPECT_EQ(p.records[e].size(), static_cast<std::size_t>(c.training.epochs * c.control_users));
      EXPECT_EQ(p.reports[e].counts.total(), p.records[e].size());
      EXPECT_EQ(p.reports[e].knowledge_degree, p.knowledge.degree);
    }
  }
  EXPECT_LT(sweep[0].subject_samples, sweep[1].subject_samples);
  // Deterministic.
  const auto again = play_rind_sweep(c, k);
  EXPECT_EQ(again[0].reports[0].accuracy, sweep[0].reports[0].accuracy);
  EXPECT_EQ(again[1].potential.potential, sweep[1].potential.potential);
}

TEST(Sweep, ServerModeNeedsStar) {
  GameConfig c = tiny_game();
  const std::vector<KnowledgePoint> k{{data::KnowledgeMode::kIidFraction, 0.5}};
  EXPECT_THROW(server_mode_sweep(c, k), PreconditionError);
  c.topology = sim::TopologyKind::kStar;
  EXPECT_EQ(server_mode_sweep(c, k).size(), 1u);
}

}  // namespace
}  // namespace byzlab::games
