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
#include "byzlab/nn.hpp"
#include "support.hpp"

namespace byzlab::nn {
namespace {

using byzlab::testing::numeric_gradient;
using byzlab::testing::random_dataset;

TEST(ModelShape, ParamCountFormula) {
  const ModelShape s{{784, 128, 64, 10}};
  EXPECT_EQ(s.param_count(), 785u * 128 + 129u * 64 + 65u * 10);
  EXPECT_EQ(s.weight_offset(0), 0u);
  EXPECT_EQ(s.weight_offset(1), 785u * 128);
  EXPECT_THROW(ModelShape{{5}}.validate(), DimensionError);
  EXPECT_THROW((ModelShape{{5, 0, 2}}.validate()), DimensionError);
}

// 2-2-2 network computed by hand: W is row-major (out x in), bias after it.
TEST(Forward, MatchesHandComputation) {
  const ModelShape shape{{2, 2, 2}, Activation::kRelu, OutputHead::kSoftmaxXent};
  ParamVector p{1, -1, 0.5, 2,  // W1
                0.1, -3,        // b1
                1, 2, -1, 1,    // W2
                0, 0.5};        // b2
  const Model m(shape, p);
  Matrix x(1, 2);
  x << 2, 1;
  // h = relu([2 - 1 + 0.1, 1 + 2 - 3]) = [1.1, 0]
  // s = [1.1 + 0, -1.1 + 0 + 0.5]
  const Matrix s = forward(m, x);
  EXPECT_NEAR(s(0, 0), 1.1, 1e-15);
  EXPECT_NEAR(s(0, 1), -0.6, 1e-15);
}

TEST(Forward, RejectsWrongWidth) {
  const Model m = Model::zeros(ModelShape{{3, 2}});
  EXPECT_THROW(forward(m, Matrix::Zero(1, 4)), DimensionError);
}

TEST(Loss, CrossEntropyOfUniformScoresIsLogK) {
  Rng rng(1);
  const Model m = Model::zeros(ModelShape{{4, 5}});
  const Dataset d = random_dataset(rng, 10, 4, 5);
  EXPECT_NEAR(mean_loss(m, d, Loss::kCrossEntropy), std::log(5.0), 1e-12);
  EXPECT_NEAR(mean_loss(m, d, Loss::kHinge), 1.0, 1e-12);
  EXPECT_NEAR(mean_loss(m, d, Loss::kMse), 1.0 / 5.0, 1e-12);
}

struct GradCase {
  OutputHead head;
  Loss loss;
  int outputs;
  Activation activation;
};

class GradientCheck : public ::testing::TestWithParam<GradCase> {};

TEST_P(GradientCheck, AnalyticMatchesCentralDifferences) {
  const auto c = GetParam();
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng = Rng(100).split(trial);
    const ModelShape shape{{3, 4, c.outputs}, c.activation, c.head};
    ASSERT_LE(shape.param_count(), 50u);
    Model m = init_model(shape, rng);
    for (auto& v : m.params) v += rng.normal(0, 0.3);  // non-zero biases
    const Dataset batch = random_dataset(rng, 6, 3, c.outputs == 1 ? 0 : c.outputs);
    const auto analytic = loss_and_gradient(m, batch, c.loss);
    const auto numeric = numeric_gradient(m, batch, c.loss);
    const double scale = std::max({analytic.gradient.norm(), numeric.norm(), 1e-8});
    EXPECT_LE(distance(analytic.gradient, numeric) / scale, 1e-4) << "trial " << trial;
    EXPECT_NEAR(analytic.loss, mean_loss(m, batch, c.loss), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Losses, GradientCheck,
    ::testing::Values(GradCase{OutputHead::kSoftmaxXent, Loss::kCrossEntropy, 3, Activation::kRelu},
                      GradCase{OutputHead::kHingeMargin, Loss::kHinge, 3, Activation::kRelu},
                      GradCase{OutputHead::kLinearMse, Loss::kMse, 1, Activation::kRelu},
                      GradCase{OutputHead::kLinearMse, Loss::kMse, 3, Activation::kIdentity}),
    [](const ::testing::TestParamInfo<GradCase>& info) {
      return std::string(to_string(info.param.loss)) + "_" + std::to_string(info.param.outputs) + "out_" +
             std::string(to_string(info.param.activation));
    });

TEST(Optimizer, SgdStepIsMinusLrTimesGradient) {
  auto opt = OptimizerState::make(OptimizerKind::kSgd, 0.1, 3);
  ParamVector p{1, 2, 3};
  opt.apply(p, ParamVector{1, -2, 0});
  EXPECT_EQ(p, (ParamVector{0.9, 2.2, 3}));
}

// With bias correction the first Adam step is lr * g / (|g| + eps).
TEST(Optimizer, FirstAdamStepHasMagnitudeLr) {
  auto opt = OptimizerState::make(OptimizerKind::kAdam, 0.01, 3);
  ParamVector p{0, 0, 0};
  opt.apply(p, ParamVector{5, -0.2, 0});
  EXPECT_NEAR(p[0], -0.01, 1e-9);
  EXPECT_NEAR(p[1], 0.01, 1e-9);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(opt.step_count, 1);
}

TEST(LocalTrain, OnePassTakesCeilNOverBatchSteps) {
  Rng rng(4);
  const Dataset d = random_dataset(rng, 70, 3, 2);
  const Model m = init_model(ModelShape{{3, 4, 2}}, rng);
  const auto opt = OptimizerState::make(OptimizerKind::kSgd, 0.05, m.params.size());
  const auto r = local_train_step(m, opt, d, 32, Rng(1));
  EXPECT_EQ(r.steps, 3);
  EXPECT_EQ(r.update, r.model.params - m.params);
  const auto fixed = local_train_step(m, opt, d, 32, Rng(1), 7);
  EXPECT_EQ(fixed.steps, 7);
}

TEST(LocalTrain, DeterministicGivenRng) {
  Rng rng(4);
  const Dataset d = random_dataset(rng, 50, 3, 2);
  const Model m = init_model(ModelShape{{3, 4, 2}}, rng);
  const auto opt = OptimizerState::make(OptimizerKind::kAdam, 0.01, m.params.size());
  const auto a = local_train_step(m, opt, d, 8, Rng(9));
  const auto b = local_train_step(m, opt, d, 8, Rng(9));
  const auto c = local_train_step(m, opt, d, 8, Rng(10));
  EXPECT_EQ(a.update, b.update);
  EXPECT_NE(a.update, c.update);
}

TEST(LocalTrain, LearnsASeparableTask) {
  Rng rng(2);
  Dataset d = random_dataset(rng, 200, 2, 2);
  for (std::size_t i = 0; i < d.size(); ++i) d.labels[i] = d.inputs(static_cast<Eigen::Index>(i), 0) > 0 ? 1 : 0;
  Model m = init_model(ModelShape{{2, 8, 2}}, rng);
  auto opt = OptimizerState::make(OptimizerKind::kAdam, 0.05, m.params.size());
  for (int epoch = 0; epoch < 30; ++epoch) {
    auto r = local_train_step(m, opt, d, 16, rng.split(static_cast<std::uint64_t>(epoch)));
    m = r.model;
    opt = r.optimizer;
  }
  EXPECT_GE(evaluate(m, d, Metric::kAccuracy), 0.95);
}

TEST(Predict, TiesGoToLowestIndex) {
  const Model zero = Model::zeros(ModelShape{{2, 3}});
  const auto p = predict(zero, Matrix::Ones(4, 2));
  for (int v : p) EXPECT_EQ(v, 0);
  // Scores 1e-20 apart still tie.
  ParamVector params = ParamVector::zeros(9);
  params[7] = 1e-20;  // bias of class 1
  const auto q = predict(Model(ModelShape{{2, 3}}, params), Matrix::Ones(1, 2));
  EXPECT_EQ(q[0], 0);
  params[7] = 1e-3;
  EXPECT_EQ(predict(Model(ModelShape{{2, 3}}, params), Matrix::Ones(1, 2))[0], 1);
}

TEST(Evaluate, ErrorRateIsOneMinusAccuracy) {
  Rng rng(8);
  const Dataset d = random_dataset(rng, 40, 3, 3);
  const Model m = init_model(ModelShape{{3, 5, 3}}, rng);
  EXPECT_DOUBLE_EQ(evaluate(m, d, Metric::kErrorRate), 1.0 - evaluate(m, d, Metric::kAccuracy));
  EXPECT_THROW(evaluate(m, d, Metric::kRmse), PreconditionError);
}

TEST(Names, RoundTrip) {
  for (auto h : {OutputHead::kSoftmaxXent, OutputHead::kLinearMse, OutputHead::kHingeMargin}) {
    EXPECT_EQ(parse_output_head(to_string(h)), h);
  }
  for (auto k : {OptimizerKind::kSgd, OptimizerKind::kAdam}) EXPECT_EQ(parse_optimizer(to_string(k)), k);
  EXPECT_THROW(parse_optimizer("rmsprop"), ConfigError);
}

}  // namespace
}  // namespace byzlab::nn
