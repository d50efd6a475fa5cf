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
#ifndef BYZLAB_DATASET_HPP_
#define BYZLAB_DATASET_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace byzlab {

/// Row-major dense matrix; rows are samples.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Labeled samples. `labels[i]` is a class index in [0, num_classes) for
/// classification sets, or a real target when num_classes == 0.
struct Dataset {
  Matrix inputs;
  std::vector<double> labels;
  int num_classes = 0;
  std::string name;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::size_t features() const { return static_cast<std::size_t>(inputs.cols()); }
  bool is_classification() const { return num_classes > 0; }
  int label(std::size_t i) const { return static_cast<int>(labels[i]); }

  /// Rows at `indices`, in the given order.
  Dataset subset(std::span<const std::size_t> indices, std::string subset_name = {}) const;

  /// Class frequencies (classification sets only).
  std::vector<double> class_frequencies() const;

  /// Throws if rows/labels disagree, a feature is non-finite, or a class
  /// label falls outside [0, num_classes).
  void validate() const;
};

/// Rows of `a` followed by rows of `b`. Both must agree on features and
/// class count.
Dataset concat(const Dataset& a, const Dataset& b, std::string name = {});

}  // namespace byzlab

#endif  // BYZLAB_DATASET_HPP_
