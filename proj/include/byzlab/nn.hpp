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
#ifndef BYZLAB_NN_HPP_
#define BYZLAB_NN_HPP_

// Minimal dense-MLP training engine: forward pass, analytic gradients for
// three losses, SGD/Adam, and evaluation metrics. Values go in, new values
// come out; nothing here holds shared mutable state.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "byzlab/dataset.hpp"
#include "byzlab/param_vector.hpp"
#include "byzlab/rng.hpp"

namespace byzlab::nn {

enum class Activation { kRelu, kIdentity };
enum class OutputHead { kSoftmaxXent, kLinearMse, kHingeMargin };
enum class Loss { kCrossEntropy, kHinge, kMse };
enum class Metric { kAccuracy, kErrorRate, kRmse, kMeanLoss };
enum class OptimizerKind { kSgd, kAdam };

struct ModelShape {
  std::vector<int> layer_sizes;  // input, hidden..., output
  Activation activation = Activation::kRelu;
  OutputHead output_head = OutputHead::kSoftmaxXent;

  /// Sum over consecutive layers of (n_in + 1) * n_out.
  std::size_t param_count() const;
  int inputs() const { return layer_sizes.front(); }
  int outputs() const { return layer_sizes.back(); }
  std::size_t num_layers() const { return layer_sizes.size() - 1; }

  /// Offset of layer l's weight block (bias follows at weight_offset + n_out*n_in).
  std::size_t weight_offset(std::size_t layer) const;

  /// Throws DimensionError unless there are >= 2 positive layer sizes.
  void validate() const;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

struct Model {
  ModelShape shape;
  ParamVector params;

  Model() = default;
  Model(ModelShape s, ParamVector p);

  /// All-zero parameters.
  static Model zeros(const ModelShape& shape);
};

/// Glorot-uniform weights, zero biases.
Model init_model(const ModelShape& shape, Rng& rng);

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  ParamVector moment1;
  ParamVector moment2;
  std::int64_t step_count = 0;

  static OptimizerState make(OptimizerKind kind, double learning_rate, std::size_t params);

  /// Applies one step with `gradient` to `params` in place.
  void apply(ParamVector& params, const ParamVector& gradient);
};

/// Output-layer scores (pre-softmax) for every input row. Hidden layers use
/// shape.activation; the last layer is always affine.
Matrix forward(const Model& model, const Matrix& batch_inputs);

struct LossGradient {
  double loss = 0.0;
  ParamVector gradient;
};

/// Mean batch loss and its gradient with respect to model.params.
///
/// Hinge is the multi-class margin max(0, 1 - s_y + max_{k != y} s_k). MSE is
/// the per-sample squared error averaged over outputs; with one output the
/// label is the regression target, with K outputs the target is one-hot.
LossGradient loss_and_gradient(const Model& model, const Dataset& batch, Loss loss);

/// Mean loss only (no gradient), for evaluation over large sets.
double mean_loss(const Model& model, const Dataset& data, Loss loss);

/// The loss a head is trained with.
Loss default_loss(OutputHead head);

struct LocalTrainResult {
  Model model;
  OptimizerState optimizer;
  ParamVector update;  // model.params - input params
  double mean_batch_loss = 0.0;
  int steps = 0;
};

/// Local training phase: shuffles `data` with `rng`, then takes minibatch
/// steps. max_steps == 0 means exactly one pass over the data; otherwise
/// exactly max_steps steps, reshuffling at every pass boundary.
LocalTrainResult local_train_step(const Model& model, const OptimizerState& opt,
                                  const Dataset& data, int batch_size, Rng rng,
                                  int max_steps = 0);

/// Class predictions: argmax of scores, ties to the lowest index. Scores
/// within 1e-12 of each other count as tied.
std::vector<int> predict(const Model& model, const Matrix& inputs);

double evaluate(const Model& model, const Dataset& data, Metric metric);

std::string_view to_string(Activation a);
std::string_view to_string(OutputHead h);
std::string_view to_string(Loss l);
std::string_view to_string(OptimizerKind k);
Activation parse_activation(std::string_view s);
OutputHead parse_output_head(std::string_view s);
Loss parse_loss(std::string_view s);
OptimizerKind parse_optimizer(std::string_view s);

}  // namespace byzlab::nn

#endif  // BYZLAB_NN_HPP_
