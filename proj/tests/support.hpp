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
#ifndef BYZLAB_TESTS_SUPPORT_HPP_
#define BYZLAB_TESTS_SUPPORT_HPP_

// Shared helpers and independent oracles for the unit and acceptance tests.
// Oracles here deliberately avoid the library's own helpers.

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "byzlab/dataset.hpp"
#include "byzlab/nn.hpp"
#include "byzlab/param_vector.hpp"
#include "byzlab/rng.hpp"

namespace byzlab::testing {

inline ParamVector random_vector(Rng& rng, std::size_t dim, double scale = 1.0) {
  ParamVector v(dim);
  for (auto& x : v) x = rng.normal(0.0, scale);
  return v;
}

inline std::vector<ParamVector> random_vectors(Rng& rng, std::size_t count, std::size_t dim,
                                               double scale = 1.0) {
  std::vector<ParamVector> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_vector(rng, dim, scale));
  return out;
}

/// Gaussian features; classification labels uniform in [0, classes), or a
/// real target when classes == 0.
inline Dataset random_dataset(Rng& rng, std::size_t rows, std::size_t features, int classes) {
  Dataset d;
  d.inputs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(features));
  for (Eigen::Index r = 0; r < d.inputs.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.inputs.cols(); ++c) d.inputs(r, c) = rng.normal();
  }
  d.num_classes = classes;
  for (std::size_t i = 0; i < rows; ++i) {
    d.labels.push_back(classes > 0 ? static_cast<double>(rng.below(static_cast<std::uint64_t>(classes)))
                                   : rng.normal());
  }
  return d;
}

/// Central finite-difference gradient of the mean batch loss.
inline ParamVector numeric_gradient(const nn::Model& model, const Dataset& batch, nn::Loss loss,
                                    double h = 1e-6) {
  ParamVector g(model.params.size());
  nn::Model probe = model;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = model.params[i];
    probe.params[i] = x + h;
    const double up = nn::mean_loss(probe, batch, loss);
    probe.params[i] = x - h;
    const double down = nn::mean_loss(probe, batch, loss);
    probe.params[i] = x;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

/// Multi-KRUM selection by exhaustive search: each score is the minimum,
/// over every subset of n - f - 2 other updates, of the summed distances.
/// Keeps the n - f lowest (ties to the lower index).
inline std::vector<bool> brute_force_multi_krum(const std::vector<ParamVector>& updates, int f) {
  const int n = static_cast<int>(updates.size());
  const int k = n - f - 2;
  std::vector<double> scores(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    double best = std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(others.size());
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      if (std::popcount(mask) != k) continue;
      double sum = 0;
      for (int b = 0; b < m; ++b) {
        if (mask & (1u << b)) {
          double sq = 0;
          for (std::size_t d = 0; d < updates[i].size(); ++d) {
            const double diff = updates[i][d] - updates[others[b]][d];
            sq += diff * diff;
          }
          sum += std::sqrt(sq);
        }
      }
      best = std::min(best, sum);
    }
    scores[i] = best;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });
  std::vector<bool> keep(n, false);
  for (int r = 0; r < n - f; ++r) keep[order[r]] = true;
  return keep;
}

inline double relative_error(const ParamVector& got, const ParamVector& want) {
  const double denom = std::max(want.norm(), 1e-300);
  return distance(got, want) / denom;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("byzlab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace byzlab::testing

#endif  // BYZLAB_TESTS_SUPPORT_HPP_
