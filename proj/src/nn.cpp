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
#include "byzlab/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "byzlab/error.hpp"

namespace byzlab::nn {
namespace {

using ConstMatMap = Eigen::Map<const Matrix>;
using MatMap = Eigen::Map<Matrix>;
using ConstRowMap = Eigen::Map<const Eigen::RowVectorXd>;
using RowMap = Eigen::Map<Eigen::RowVectorXd>;

constexpr Eigen::Index kEvalChunk = 2048;

// Scores closer than this are a tie. An attacked model can sit within
// rounding error of all-zero, where argmax would otherwise follow noise.
constexpr double kTieTolerance = 1e-12;

struct LayerView {
  ConstMatMap weights;  // n_out x n_in
  ConstRowMap bias;     // n_out
};

LayerView layer_view(const Model& model, std::size_t layer) {
  const auto& sizes = model.shape.layer_sizes;
  const Eigen::Index n_in = sizes[layer];
  const Eigen::Index n_out = sizes[layer + 1];
  const double* base = model.params.data() + model.shape.weight_offset(layer);
  return {ConstMatMap(base, n_out, n_in), ConstRowMap(base + n_out * n_in, n_out)};
}

void check_inputs(const Model& model, const Matrix& inputs) {
  if (inputs.rows() > 0 && inputs.cols() != model.shape.inputs()) {
    throw DimensionError("forward: input rows have " + std::to_string(inputs.cols()) +
                         " features, model expects " + std::to_string(model.shape.inputs()));
  }
}

// Forward pass keeping every layer's input (activations[0] is the batch).
Matrix forward_impl(const Model& model, const Matrix& inputs, std::vector<Matrix>* activations) {
  const std::size_t layers = model.shape.num_layers();
  Matrix a = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    const LayerView view = layer_view(model, l);
    Matrix z = a * view.weights.transpose();
    z.rowwise() += view.bias;
    if (l + 1 < layers && model.shape.activation == Activation::kRelu) {
      z = z.cwiseMax(0.0);
    }
    if (activations != nullptr) activations->push_back(std::move(a));
    a = std::move(z);
  }
  return a;
}

int argmax_excluding(const Eigen::Ref<const Eigen::RowVectorXd>& row, int excluded) {
  int best = -1;
  for (int k = 0; k < row.size(); ++k) {
    if (k == excluded) continue;
    if (best < 0 || row[k] > row[best]) best = k;
  }
  return best;
}

void check_label(const Dataset& batch, std::size_t i, int classes) {
  const double y = batch.labels[i];
  if (!(y >= 0.0) || y >= classes || y != std::floor(y)) {
    throw PreconditionError("label " + std::to_string(y) + " at sample " + std::to_string(i) +
                            " out of range for " + std::to_string(classes) + " outputs");
  }
}

// Per-row loss and, optionally, dLoss/dScores (already divided by the batch
// size).
double output_loss(const Matrix& scores, const Dataset& batch, Loss loss, Matrix* grad) {
  const Eigen::Index n = scores.rows();
  const Eigen::Index k = scores.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  if (grad != nullptr) grad->setZero(n, k);

  switch (loss) {
    case Loss::kCrossEntropy: {
      if (k < 2) throw PreconditionError("cross_entropy needs at least 2 outputs");
      for (Eigen::Index i = 0; i < n; ++i) {
        check_label(batch, static_cast<std::size_t>(i), static_cast<int>(k));
        const int y = batch.label(static_cast<std::size_t>(i));
        const double peak = scores.row(i).maxCoeff();
        Eigen::RowVectorXd e = (scores.row(i).array() - peak).exp().matrix();
        const double z = e.sum();
        total += std::log(z) - (scores(i, y) - peak);
        if (grad != nullptr) {
          grad->row(i) = e / z * inv_n;
          (*grad)(i, y) -= inv_n;
        }
      }
      break;
    }
    case Loss::kHinge: {
      if (k < 2) throw PreconditionError("hinge needs at least 2 outputs");
      for (Eigen::Index i = 0; i < n; ++i) {
        check_label(batch, static_cast<std::size_t>(i), static_cast<int>(k));
        const int y = batch.label(static_cast<std::size_t>(i));
        const int rival = argmax_excluding(scores.row(i), y);
        const double margin = 1.0 - scores(i, y) + scores(i, rival);
        if (margin > 0.0) {
          total += margin;
          if (grad != nullptr) {
            (*grad)(i, y) -= inv_n;
            (*grad)(i, rival) += inv_n;
          }
        }
      }
      break;
    }
    case Loss::kMse: {
      const double inv_k = 1.0 / static_cast<double>(k);
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::RowVectorXd target = Eigen::RowVectorXd::Zero(k);
        if (k == 1) {
          target[0] = batch.labels[static_cast<std::size_t>(i)];
        } else {
          check_label(batch, static_cast<std::size_t>(i), static_cast<int>(k));
          target[batch.label(static_cast<std::size_t>(i))] = 1.0;
        }
        const Eigen::RowVectorXd diff = scores.row(i) - target;
        total += diff.squaredNorm() * inv_k;
        if (grad != nullptr) grad->row(i) = 2.0 * inv_k * inv_n * diff;
      }
      break;
    }
  }
  return total * inv_n;
}

bool is_classification_head(OutputHead head) {
  return head == OutputHead::kSoftmaxXent || head == OutputHead::kHingeMargin;
}

}  // namespace

// ---------------------------------------------------------------------------
// Shapes and models

std::size_t ModelShape::param_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    total += static_cast<std::size_t>(layer_sizes[l] + 1) * static_cast<std::size_t>(layer_sizes[l + 1]);
  }
  return total;
}

std::size_t ModelShape::weight_offset(std::size_t layer) const {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    offset += static_cast<std::size_t>(layer_sizes[l] + 1) * static_cast<std::size_t>(layer_sizes[l + 1]);
  }
  return offset;
}

void ModelShape::validate() const {
  if (layer_sizes.size() < 2) {
    throw DimensionError("model shape needs at least 2 layer sizes, got " +
                         std::to_string(layer_sizes.size()));
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw DimensionError("layer sizes must be positive");
  }
}

Model::Model(ModelShape s, ParamVector p) : shape(std::move(s)), params(std::move(p)) {
  shape.validate();
  if (params.size() != shape.param_count()) {
    throw DimensionError("model params have length " + std::to_string(params.size()) +
                         ", shape needs " + std::to_string(shape.param_count()));
  }
}

Model Model::zeros(const ModelShape& shape) {
  shape.validate();
  return Model(shape, ParamVector::zeros(shape.param_count()));
}

Model init_model(const ModelShape& shape, Rng& rng) {
  Model model = Model::zeros(shape);
  for (std::size_t l = 0; l < shape.num_layers(); ++l) {
    const int n_in = shape.layer_sizes[l];
    const int n_out = shape.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(n_in + n_out));
    double* w = model.params.data() + shape.weight_offset(l);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_in) * n_out; ++i) {
      w[i] = rng.uniform(-limit, limit);
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Optimizers

OptimizerState OptimizerState::make(OptimizerKind kind, double learning_rate, std::size_t params) {
  OptimizerState s;
  s.kind = kind;
  s.learning_rate = learning_rate;
  if (kind == OptimizerKind::kAdam) {
    s.moment1 = ParamVector::zeros(params);
    s.moment2 = ParamVector::zeros(params);
  }
  return s;
}

void OptimizerState::apply(ParamVector& params, const ParamVector& gradient) {
  params.check_same_length(gradient, "optimizer step");
  ++step_count;
  if (kind == OptimizerKind::kSgd) {
    params.add_scaled(gradient, -learning_rate);
    return;
  }
  if (moment1.size() != params.size() || moment2.size() != params.size()) {
    throw DimensionError("Adam moments do not match the parameter count");
  }
  auto m = moment1.vec().array();
  auto v = moment2.vec().array();
  const auto g = gradient.vec().array();
  m = adam_beta1 * m + (1.0 - adam_beta1) * g;
  v = adam_beta2 * v + (1.0 - adam_beta2) * g.square();
  const double t = static_cast<double>(step_count);
  const double c1 = 1.0 - std::pow(adam_beta1, t);
  const double c2 = 1.0 - std::pow(adam_beta2, t);
  params.vec().array() -= learning_rate * (m / c1) / ((v / c2).sqrt() + adam_eps);
}

// ---------------------------------------------------------------------------
// Forward, loss, gradient

Matrix forward(const Model& model, const Matrix& batch_inputs) {
  check_inputs(model, batch_inputs);
  if (batch_inputs.rows() == 0) return Matrix(0, model.shape.outputs());
  return forward_impl(model, batch_inputs, nullptr);
}

LossGradient loss_and_gradient(const Model& model, const Dataset& batch, Loss loss) {
  if (batch.empty()) throw PreconditionError("loss_and_gradient: empty batch");
  check_inputs(model, batch.inputs);

  std::vector<Matrix> activations;
  activations.reserve(model.shape.num_layers());
  const Matrix scores = forward_impl(model, batch.inputs, &activations);

  LossGradient out;
  Matrix dz;
  out.loss = output_loss(scores, batch, loss, &dz);
  out.gradient = ParamVector::zeros(model.shape.param_count());

  for (std::size_t l = model.shape.num_layers(); l-- > 0;) {
    const auto& sizes = model.shape.layer_sizes;
    const Eigen::Index n_in = sizes[l];
    const Eigen::Index n_out = sizes[l + 1];
    double* g = out.gradient.data() + model.shape.weight_offset(l);
    MatMap(g, n_out, n_in).noalias() = dz.transpose() * activations[l];
    RowMap(g + n_out * n_in, n_out) = dz.colwise().sum();
    if (l == 0) break;
    Matrix da = dz * layer_view(model, l).weights;
    if (model.shape.activation == Activation::kRelu) {
      da = (activations[l].array() > 0.0).select(da, 0.0);
    }
    dz = std::move(da);
  }
  return out;
}

double mean_loss(const Model& model, const Dataset& data, Loss loss) {
  if (data.empty()) throw PreconditionError("mean_loss: empty dataset");
  check_inputs(model, data.inputs);
  double total = 0.0;
  const Eigen::Index n = data.inputs.rows();
  for (Eigen::Index start = 0; start < n; start += kEvalChunk) {
    const Eigen::Index len = std::min(kEvalChunk, n - start);
    Dataset chunk;
    chunk.inputs = data.inputs.middleRows(start, len);
    chunk.labels.assign(data.labels.begin() + start, data.labels.begin() + start + len);
    chunk.num_classes = data.num_classes;
    const Matrix scores = forward_impl(model, chunk.inputs, nullptr);
    total += output_loss(scores, chunk, loss, nullptr) * static_cast<double>(len);
  }
  return total / static_cast<double>(n);
}

Loss default_loss(OutputHead head) {
  switch (head) {
    case OutputHead::kSoftmaxXent:
      return Loss::kCrossEntropy;
    case OutputHead::kHingeMargin:
      return Loss::kHinge;
    case OutputHead::kLinearMse:
      return Loss::kMse;
  }
  return Loss::kCrossEntropy;
}

// ---------------------------------------------------------------------------
// Training and evaluation

LocalTrainResult local_train_step(const Model& model, const OptimizerState& opt,
                                  const Dataset& data, int batch_size, Rng rng, int max_steps) {
  if (data.empty()) throw PreconditionError("local_train_step: empty local dataset");
  if (batch_size <= 0) throw PreconditionError("local_train_step: batch_size must be positive");

  LocalTrainResult result{model, opt, {}, 0.0, 0};
  if (result.optimizer.kind == OptimizerKind::kAdam &&
      result.optimizer.moment1.size() != model.params.size()) {
    result.optimizer.moment1 = ParamVector::zeros(model.params.size());
    result.optimizer.moment2 = ParamVector::zeros(model.params.size());
  }

  const std::size_t n = data.size();
  const auto batch = static_cast<std::size_t>(batch_size);
  const int steps = max_steps > 0 ? max_steps : static_cast<int>((n + batch - 1) / batch);
  const Loss loss = default_loss(model.shape.output_head);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  Dataset mb;
  mb.num_classes = data.num_classes;
  std::size_t cursor = 0;
  double loss_sum = 0.0;
  for (int step = 0; step < steps; ++step) {
    if (cursor >= n) {
      rng.shuffle(order);
      cursor = 0;
    }
    const std::size_t len = std::min(batch, n - cursor);
    mb.inputs.resize(static_cast<Eigen::Index>(len), data.inputs.cols());
    mb.labels.resize(len);
    for (std::size_t r = 0; r < len; ++r) {
      const std::size_t src = order[cursor + r];
      mb.inputs.row(static_cast<Eigen::Index>(r)) = data.inputs.row(static_cast<Eigen::Index>(src));
      mb.labels[r] = data.labels[src];
    }
    cursor += len;
    LossGradient lg = loss_and_gradient(result.model, mb, loss);
    loss_sum += lg.loss;
    result.optimizer.apply(result.model.params, lg.gradient);
  }
  result.steps = steps;
  result.mean_batch_loss = loss_sum / steps;
  result.update = result.model.params - model.params;
  return result;
}

std::vector<int> predict(const Model& model, const Matrix& inputs) {
  check_inputs(model, inputs);
  std::vector<int> out(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index start = 0; start < inputs.rows(); start += kEvalChunk) {
    const Eigen::Index len = std::min(kEvalChunk, inputs.rows() - start);
    const Matrix scores = forward_impl(model, inputs.middleRows(start, len), nullptr);
    for (Eigen::Index i = 0; i < len; ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < scores.cols(); ++k) {
        if (scores(i, k) > scores(i, best) + kTieTolerance) best = k;
      }
      out[static_cast<std::size_t>(start + i)] = static_cast<int>(best);
    }
  }
  return out;
}

double evaluate(const Model& model, const Dataset& data, Metric metric) {
  if (data.empty()) throw PreconditionError("evaluate: empty dataset");
  const OutputHead head = model.shape.output_head;
  switch (metric) {
    case Metric::kAccuracy:
    case Metric::kErrorRate: {
      if (!is_classification_head(head) || !data.is_classification()) {
        throw PreconditionError("accuracy/error_rate need a classification head and labels");
      }
      const std::vector<int> pred = predict(model, data.inputs);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == data.label(i)) ++correct;
      }
      const double acc = static_cast<double>(correct) / static_cast<double>(pred.size());
      return metric == Metric::kAccuracy ? acc : 1.0 - acc;
    }
    case Metric::kRmse:
      if (head != OutputHead::kLinearMse) {
        throw PreconditionError("rmse needs the linear_mse head");
      }
      return std::sqrt(mean_loss(model, data, Loss::kMse));
    case Metric::kMeanLoss:
      return mean_loss(model, data, default_loss(head));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Activation a) { return a == Activation::kRelu ? "relu" : "identity"; }

std::string_view to_string(OutputHead h) {
  switch (h) {
    case OutputHead::kSoftmaxXent:
      return "softmax_xent";
    case OutputHead::kLinearMse:
      return "linear_mse";
    case OutputHead::kHingeMargin:
      return "hinge_margin";
  }
  return "?";
}

std::string_view to_string(Loss l) {
  switch (l) {
    case Loss::kCrossEntropy:
      return "cross_entropy";
    case Loss::kHinge:
      return "hinge";
    case Loss::kMse:
      return "mse";
  }
  return "?";
}

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::kSgd ? "sgd" : "adam"; }

Activation parse_activation(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + std::string(s) + "' (relu, identity)");
}

OutputHead parse_output_head(std::string_view s) {
  if (s == "softmax_xent") return OutputHead::kSoftmaxXent;
  if (s == "linear_mse") return OutputHead::kLinearMse;
  if (s == "hinge_margin") return OutputHead::kHingeMargin;
  throw ConfigError("unknown output head '" + std::string(s) +
                    "' (softmax_xent, linear_mse, hinge_margin)");
}

Loss parse_loss(std::string_view s) {
  if (s == "cross_entropy") return Loss::kCrossEntropy;
  if (s == "hinge") return Loss::kHinge;
  if (s == "mse") return Loss::kMse;
  throw ConfigError("unknown loss '" + std::string(s) + "'");
}

OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + std::string(s) + "' (sgd, adam)");
}

}  // namespace byzlab::nn
