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
#include "byzlab/dataset.hpp"

#include <cmath>

#include "byzlab/error.hpp"

namespace byzlab {

Dataset Dataset::subset(std::span<const std::size_t> indices, std::string subset_name) const {
  Dataset out;
  out.num_classes = num_classes;
  out.name = subset_name.empty() ? name : std::move(subset_name);
  out.inputs.resize(static_cast<Eigen::Index>(indices.size()), inputs.cols());
  out.labels.resize(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) {
      throw DimensionError("subset index " + std::to_string(indices[r]) + " out of range for " +
                           std::to_string(size()) + " samples");
    }
    out.inputs.row(static_cast<Eigen::Index>(r)) = inputs.row(static_cast<Eigen::Index>(indices[r]));
    out.labels[r] = labels[indices[r]];
  }
  return out;
}

std::vector<double> Dataset::class_frequencies() const {
  std::vector<double> freq(static_cast<std::size_t>(std::max(num_classes, 0)), 0.0);
  if (empty() || num_classes <= 0) return freq;
  for (std::size_t i = 0; i < size(); ++i) freq[static_cast<std::size_t>(label(i))] += 1.0;
  for (double& f : freq) f /= static_cast<double>(size());
  return freq;
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(inputs.rows()) != labels.size()) {
    throw DimensionError("dataset '" + name + "': " + std::to_string(inputs.rows()) +
                         " rows but " + std::to_string(labels.size()) + " labels");
  }
  if (!inputs.allFinite()) throw DimensionError("dataset '" + name + "': non-finite feature");
  if (num_classes > 0) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double y = labels[i];
      if (y < 0 || y >= num_classes || y != std::floor(y)) {
        throw DimensionError("dataset '" + name + "': label " + std::to_string(y) +
                             " at row " + std::to_string(i) + " outside [0, " +
                             std::to_string(num_classes) + ")");
      }
    }
  }
}

Dataset concat(const Dataset& a, const Dataset& b, std::string name) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.inputs.cols() != b.inputs.cols() || a.num_classes != b.num_classes) {
    throw DimensionError("concat: datasets disagree on features or classes");
  }
  Dataset out;
  out.name = name.empty() ? a.name + "+" + b.name : std::move(name);
  out.num_classes = a.num_classes;
  out.inputs.resize(a.inputs.rows() + b.inputs.rows(), a.inputs.cols());
  out.inputs.topRows(a.inputs.rows()) = a.inputs;
  out.inputs.bottomRows(b.inputs.rows()) = b.inputs;
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

}  // namespace byzlab
