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
#include "byzlab/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>

#include "byzlab/csv.hpp"
#include "byzlab/error.hpp"

namespace byzlab::data {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

// Whole file, transparently gunzipped. Offsets reported by the IDX parser
// refer to this decompressed stream.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (f == nullptr) throw ParseError("cannot open " + path.string(), 0);
  std::vector<std::uint8_t> bytes;
  std::uint8_t chunk[1 << 16];
  while (true) {
    const int got = gzread(f, chunk, sizeof(chunk));
    if (got < 0) {
      gzclose(f);
      throw ParseError(path.string() + ": decompression failed after byte " +
                           std::to_string(bytes.size()),
                       bytes.size());
    }
    if (got == 0) break;
    bytes.insert(bytes.end(), chunk, chunk + got);
  }
  gzclose(f);
  return bytes;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

void require_bytes(const std::vector<std::uint8_t>& b, std::size_t needed,
                   const std::filesystem::path& path, const char* what) {
  if (b.size() < needed) {
    throw ParseError(path.string() + ": truncated " + what + " at byte offset " +
                         std::to_string(b.size()) + " (need " + std::to_string(needed) + " bytes)",
                     b.size());
  }
}

}  // namespace

void Partition::validate(std::size_t dataset_size) const {
  std::vector<char> seen(dataset_size, 0);
  for (std::size_t u = 0; u < assignments.size(); ++u) {
    for (std::size_t idx : assignments[u]) {
      if (idx >= dataset_size) {
        throw DimensionError("partition: user " + std::to_string(u) + " has index " +
                             std::to_string(idx) + " >= " + std::to_string(dataset_size));
      }
      if (seen[idx]) throw DimensionError("partition: index " + std::to_string(idx) + " assigned twice");
      seen[idx] = 1;
    }
  }
}

// ---------------------------------------------------------------------------
// Loaders

Dataset load_mnist_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path) {
  const auto img = read_maybe_gzip(images_path);
  require_bytes(img, 16, images_path, "header");
  const std::uint32_t img_magic = be32(img, 0);
  if (img_magic != kImagesMagic) {
    throw ParseError(images_path.string() + ": bad images magic " + hex32(img_magic) +
                         " at byte offset 0 (expected " + hex32(kImagesMagic) + ")",
                     0);
  }
  const std::size_t count = be32(img, 4);
  const std::size_t rows = be32(img, 8);
  const std::size_t cols = be32(img, 12);
  const std::size_t pixels = rows * cols;
  require_bytes(img, 16 + count * pixels, images_path, "pixel data");

  const auto lab = read_maybe_gzip(labels_path);
  require_bytes(lab, 8, labels_path, "header");
  const std::uint32_t lab_magic = be32(lab, 0);
  if (lab_magic != kLabelsMagic) {
    throw ParseError(labels_path.string() + ": bad labels magic " + hex32(lab_magic) +
                         " at byte offset 0 (expected " + hex32(kLabelsMagic) + ")",
                     0);
  }
  const std::size_t label_count = be32(lab, 4);
  if (label_count != count) {
    throw ParseError(labels_path.string() + ": label count " + std::to_string(label_count) +
                         " at byte offset 4 does not match image count " + std::to_string(count),
                     4);
  }
  require_bytes(lab, 8 + count, labels_path, "label data");

  Dataset ds;
  ds.name = "mnist";
  ds.num_classes = 10;
  ds.inputs.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(pixels));
  ds.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* px = img.data() + 16 + i * pixels;
    for (std::size_t p = 0; p < pixels; ++p) {
      ds.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = px[p] / 255.0;
    }
    const std::uint8_t y = lab[8 + i];
    if (y > 9) {
      throw ParseError(labels_path.string() + ": label " + std::to_string(y) +
                           " at byte offset " + std::to_string(8 + i) + " outside [0, 9]",
                       8 + i);
    }
    ds.labels[i] = y;
  }
  return ds;
}

Dataset parse_tabular_csv(std::string_view text, std::string_view label_column, bool normalize,
                          std::string_view source) {
  const csv::Table table = csv::parse_table(text, source);
  const int label_col = table.column(label_column);
  if (label_col < 0) {
    throw ParseError(std::string(source) + ": label column '" + std::string(label_column) +
                         "' not in header",
                     1);
  }
  const std::size_t n = table.rows.size();
  const std::size_t f = table.header.size() - 1;
  Dataset ds;
  ds.name = std::string(source);
  ds.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  ds.labels.resize(n);
  bool integral = true;
  double max_label = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    Eigen::Index out_col = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      double v = 0.0;
      if (!csv::parse_double(table.rows[r][c], v) || !std::isfinite(v)) {
        // Line numbers count the header as line 1.
        throw ParseError(std::string(source) + ": non-numeric cell '" + table.rows[r][c] +
                             "' at row " + std::to_string(r + 2) + ", column " +
                             std::to_string(c + 1) + " ('" + table.header[c] + "')",
                         r + 2);
      }
      if (static_cast<int>(c) == label_col) {
        ds.labels[r] = v;
        if (v < 0 || v != std::floor(v)) integral = false;
        max_label = std::max(max_label, v);
      } else {
        ds.inputs(static_cast<Eigen::Index>(r), out_col++) = v;
      }
    }
  }
  ds.num_classes = (integral && n > 0) ? static_cast<int>(max_label) + 1 : 0;
  if (ds.num_classes == 1) ds.num_classes = 2;  // single observed class is still binary
  if (normalize) zscore_features(ds);
  return ds;
}

Dataset load_tabular_csv(const std::filesystem::path& path, std::string_view label_column,
                         bool normalize) {
  Dataset ds = parse_tabular_csv(csv::read_file(path), label_column, normalize, path.string());
  ds.name = path.stem().string();
  return ds;
}

void zscore_features(Dataset& data) {
  const auto n = static_cast<double>(data.inputs.rows());
  if (n == 0) return;
  for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) {
    auto col = data.inputs.col(c);
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd > 0) col /= sd;
  }
}

// ---------------------------------------------------------------------------
// Partitions

Partition partition_iid(std::size_t n_samples, int n_users, Rng rng) {
  if (n_users < 1) throw PreconditionError("partition_iid: n_users must be >= 1");
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  Partition p;
  p.assignments.resize(static_cast<std::size_t>(n_users));
  for (std::size_t i = 0; i < n_samples; ++i) {
    p.assignments[i % static_cast<std::size_t>(n_users)].push_back(order[i]);
  }
  return p;
}

Partition partition_sizes(std::size_t n_samples, const std::vector<std::size_t>& sizes, Rng rng) {
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (total > n_samples) {
    throw PreconditionError("partition_sizes: sizes sum to " + std::to_string(total) +
                            " but only " + std::to_string(n_samples) + " samples");
  }
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  Partition p;
  std::size_t cursor = 0;
  for (std::size_t s : sizes) {
    p.assignments.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                               order.begin() + static_cast<std::ptrdiff_t>(cursor + s));
    cursor += s;
  }
  return p;
}

Partition partition_by_label(const Dataset& dataset, int n_users) {
  if (!dataset.is_classification()) {
    throw PreconditionError("partition_by_label needs a classification dataset");
  }
  if (n_users < 1 || static_cast<std::size_t>(n_users) > dataset.size()) {
    throw PreconditionError("partition_by_label: cannot split " + std::to_string(dataset.size()) +
                            " samples across " + std::to_string(n_users) + " users");
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dataset.labels[a] < dataset.labels[b];
  });
  Partition p;
  const std::size_t n = order.size();
  const auto users = static_cast<std::size_t>(n_users);
  std::size_t start = 0;
  for (std::size_t u = 0; u < users; ++u) {
    const std::size_t len = n / users + (u < n % users ? 1 : 0);
    p.assignments.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                               order.begin() + static_cast<std::ptrdiff_t>(start + len));
    start += len;
  }
  return p;
}

std::vector<std::size_t> knowledge_slice_indices(const Dataset& dataset, KnowledgeMode mode,
                                                 double degree, Rng rng) {
  std::vector<std::size_t> out;
  if (mode == KnowledgeMode::kLabelsPrefix) {
    if (!dataset.is_classification()) {
      throw PreconditionError("labels_prefix knowledge needs a classification dataset");
    }
    if (degree < 1 || degree > dataset.num_classes || degree != std::floor(degree)) {
      throw PreconditionError("labels_prefix degree must be an integer in [1, " +
                              std::to_string(dataset.num_classes) + "], got " +
                              csv::format_double(degree));
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.labels[i] < degree) out.push_back(i);
    }
    return out;
  }
  if (!(degree > 0.0 && degree <= 1.0)) {
    throw PreconditionError("iid_fraction degree must be in (0, 1], got " + csv::format_double(degree));
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  const auto take = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(degree * static_cast<double>(dataset.size()))));
  out.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(take, order.size())));
  std::sort(out.begin(), out.end());
  return out;
}

Dataset knowledge_slice(const Dataset& dataset, KnowledgeMode mode, double degree, Rng rng) {
  const auto idx = knowledge_slice_indices(dataset, mode, degree, rng);
  return dataset.subset(idx, dataset.name + "/knowledge");
}

std::string_view to_string(KnowledgeMode mode) {
  return mode == KnowledgeMode::kLabelsPrefix ? "labels_prefix" : "iid_fraction";
}

KnowledgeMode parse_knowledge_mode(std::string_view s) {
  if (s == "labels_prefix") return KnowledgeMode::kLabelsPrefix;
  if (s == "iid_fraction") return KnowledgeMode::kIidFraction;
  throw ConfigError("unknown knowledge mode '" + std::string(s) + "' (labels_prefix, iid_fraction)");
}

// ---------------------------------------------------------------------------
// Splits

TrainValidation stratified_split(const Dataset& source, std::size_t train_size,
                                 std::size_t validation_size, Rng rng) {
  if (!source.is_classification()) throw PreconditionError("stratified_split needs class labels");
  if (train_size + validation_size > source.size()) {
    throw PreconditionError("stratified_split: requested " +
                            std::to_string(train_size + validation_size) + " of " +
                            std::to_string(source.size()) + " samples");
  }
  const auto k = static_cast<std::size_t>(source.num_classes);
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < source.size(); ++i) by_class[static_cast<std::size_t>(source.label(i))].push_back(i);
  for (std::size_t c = 0; c < k; ++c) {
    Rng class_rng = rng.split(c);
    class_rng.shuffle(by_class[c]);
  }
  // Round-robin draw over classes: counts stay balanced until a class runs dry.
  std::vector<std::size_t> cursor(k, 0);
  auto draw = [&](std::size_t count) {
    std::vector<std::size_t> picked;
    while (picked.size() < count) {
      bool progressed = false;
      for (std::size_t c = 0; c < k && picked.size() < count; ++c) {
        if (cursor[c] < by_class[c].size()) {
          picked.push_back(by_class[c][cursor[c]++]);
          progressed = true;
        }
      }
      if (!progressed) break;
    }
    std::sort(picked.begin(), picked.end());
    return picked;
  };
  const auto train_idx = draw(train_size);
  const auto val_idx = draw(validation_size);
  return {source.subset(train_idx, source.name + "/train"),
          source.subset(val_idx, source.name + "/validation")};
}

TrainValidation shuffle_split(const Dataset& source, std::size_t train_size, Rng rng) {
  if (train_size > source.size()) throw PreconditionError("shuffle_split: train_size too large");
  std::vector<std::size_t> order(source.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(train_size), order.end());
  return {source.subset(train, source.name + "/train"), source.subset(test, source.name + "/test")};
}

// ---------------------------------------------------------------------------
// Synthetic Pima-format table

const std::vector<std::string>& pima_columns() {
  static const std::vector<std::string> kColumns = {
      "Pregnancies", "Glucose", "BloodPressure", "SkinThickness", "Insulin",
      "BMI",         "DiabetesPedigreeFunction", "Age", "Outcome"};
  return kColumns;
}

Dataset make_synthetic_pima(Rng rng, std::size_t n) {
  struct Feature {
    double mean0, sd0, mean1, sd1, lo, hi, step;
  };
  // Class-conditional means/sds loosely follow published Pima summaries.
  static constexpr Feature kFeatures[8] = {
      {3.3, 3.0, 4.9, 3.7, 0, 17, 1},          // Pregnancies
      {110.0, 26.0, 141.0, 32.0, 44, 199, 1},  // Glucose
      {68.2, 12.0, 70.8, 12.5, 24, 122, 1},    // BloodPressure
      {19.7, 14.9, 22.2, 17.7, 0, 99, 1},      // SkinThickness
      {68.8, 98.9, 100.3, 138.7, 0, 846, 1},   // Insulin
      {30.3, 7.7, 35.1, 7.3, 18, 67.1, 0.1},   // BMI
      {0.43, 0.30, 0.55, 0.37, 0.078, 2.42, 0.001},  // DiabetesPedigreeFunction
      {31.2, 11.7, 37.1, 11.0, 21, 81, 1},     // Age
  };
  const auto positives = static_cast<std::size_t>(std::llround(0.32 * static_cast<double>(n)));
  std::vector<int> outcome(n, 0);
  std::fill(outcome.begin(), outcome.begin() + static_cast<std::ptrdiff_t>(positives), 1);
  Rng order_rng = rng.split("order");
  order_rng.shuffle(outcome);

  Dataset ds;
  ds.name = "pima_synthetic";
  ds.num_classes = 2;
  ds.inputs.resize(static_cast<Eigen::Index>(n), 8);
  ds.labels.resize(n);
  Rng feature_rng = rng.split("features");
  for (std::size_t i = 0; i < n; ++i) {
    const int y = outcome[i];
    ds.labels[i] = y;
    for (int f = 0; f < 8; ++f) {
      const Feature& spec = kFeatures[f];
      double v = y == 0 ? feature_rng.normal(spec.mean0, spec.sd0) : feature_rng.normal(spec.mean1, spec.sd1);
      v = std::clamp(v, spec.lo, spec.hi);
      v = std::round(v / spec.step) * spec.step;
      // Re-round through the step's decimal precision so CSV text is clean.
      const double scale = 1.0 / spec.step;
      v = std::round(v * scale) / scale;
      ds.inputs(static_cast<Eigen::Index>(i), f) = v;
    }
  }
  return ds;
}

std::string to_pima_csv(const Dataset& data) {
  std::string out;
  const auto& cols = pima_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c > 0) out += ',';
    out += cols[c];
  }
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (Eigen::Index f = 0; f < data.inputs.cols(); ++f) {
      out += csv::format_double(data.inputs(static_cast<Eigen::Index>(i), f));
      out += ',';
    }
    out += csv::format_double(data.labels[i]);
    out += '\n';
  }
  return out;
}

}  // namespace byzlab::data
