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
#ifndef BYZLAB_DATA_HPP_
#define BYZLAB_DATA_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "byzlab/dataset.hpp"
#include "byzlab/rng.hpp"

namespace byzlab::data {

/// Per-user sample indices into one Dataset. Index sets are pairwise
/// disjoint.
struct Partition {
  std::vector<std::vector<std::size_t>> assignments;

  std::size_t users() const { return assignments.size(); }
  /// Throws unless every index is < dataset_size and appears at most once.
  void validate(std::size_t dataset_size) const;
};

/// Reads an IDX image/label file pair (raw or gzip-compressed). Pixels are
/// scaled to [0, 1]; 10 classes. Malformed input raises ParseError carrying
/// the byte offset of the problem.
Dataset load_mnist_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path);

/// Reads a headered, comma-separated numeric table. The label column is
/// selected by header name. Integral non-negative labels make a
/// classification set with K = max + 1 classes; anything else is regression.
/// With `normalize`, each feature column is z-scored (population sd; constant
/// columns are only centered).
Dataset load_tabular_csv(const std::filesystem::path& path, std::string_view label_column,
                         bool normalize);

/// Same as load_tabular_csv over in-memory text; `source` names it in errors.
Dataset parse_tabular_csv(std::string_view text, std::string_view label_column, bool normalize,
                          std::string_view source = "<memory>");

/// In-place z-score of every feature column.
void zscore_features(Dataset& data);

/// Shuffle then deal round-robin; user sizes differ by at most one.
Partition partition_iid(std::size_t n_samples, int n_users, Rng rng);

/// Shuffle then cut into consecutive blocks of the given sizes. The sizes may
/// sum to less than n_samples (the remainder is unassigned).
Partition partition_sizes(std::size_t n_samples, const std::vector<std::size_t>& sizes, Rng rng);

/// Sort by label (stable) and cut into n_users contiguous near-equal chunks.
/// With balanced classes and n_users a multiple of K, each class lands on
/// exactly n_users / K users.
Partition partition_by_label(const Dataset& dataset, int n_users);

enum class KnowledgeMode { kLabelsPrefix, kIidFraction };

/// Sorted indices of the test subject's knowledge for one degree.
/// labels_prefix: degree d in [1, K] keeps labels {0..d-1}.
/// iid_fraction: degree in (0, 1] keeps round(degree * N) samples (at least
/// one), a prefix of one seeded permutation, so slices nest as degree grows.
std::vector<std::size_t> knowledge_slice_indices(const Dataset& dataset, KnowledgeMode mode,
                                                 double degree, Rng rng);

Dataset knowledge_slice(const Dataset& dataset, KnowledgeMode mode, double degree, Rng rng);

std::string_view to_string(KnowledgeMode mode);
KnowledgeMode parse_knowledge_mode(std::string_view s);

/// Seeded stratified subsample: disjoint train/validation sets with
/// per-class counts as equal as the source allows.
struct TrainValidation {
  Dataset train;
  Dataset validation;
};
TrainValidation stratified_split(const Dataset& source, std::size_t train_size,
                                 std::size_t validation_size, Rng rng);

/// Seeded random split: the first `train_size` of a shuffle become train, the
/// rest test.
TrainValidation shuffle_split(const Dataset& source, std::size_t train_size, Rng rng);

/// Synthetic stand-in for the Pima diabetes table: 8 clinical-style
/// features, binary Outcome, class balance 68/32 (522 negatives, 246
/// positives at n = 768).
Dataset make_synthetic_pima(Rng rng, std::size_t n = 768);

/// CSV text for a Pima-format table (header + rows, LF endings).
std::string to_pima_csv(const Dataset& data);

/// Column names used by the Pima-format CSV.
const std::vector<std::string>& pima_columns();

}  // namespace byzlab::data

#endif  // BYZLAB_DATA_HPP_
