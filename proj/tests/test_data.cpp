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

#include <fstream>
#include <set>

#include "byzlab/csv.hpp"
#include "byzlab/data.hpp"
#include "byzlab/error.hpp"
#include "support.hpp"

namespace byzlab::data {
namespace {

namespace fs = std::filesystem;
using byzlab::testing::random_dataset;
using byzlab::testing::temp_dir;

void put32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<unsigned char>(v >> s));
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

// Two 2x2 images with labels 3 and 7.
struct IdxFiles {
  std::vector<unsigned char> images, labels;
  IdxFiles() {
    put32(images, 0x00000803);
    put32(images, 2);
    put32(images, 2);
    put32(images, 2);
    for (unsigned char px : {0, 255, 51, 102, 0, 0, 0, 255}) images.push_back(px);
    put32(labels, 0x00000801);
    put32(labels, 2);
    labels.push_back(3);
    labels.push_back(7);
  }
};

TEST(Mnist, ParsesRawIdx) {
  const auto dir = temp_dir("idx");
  IdxFiles f;
  write_bytes(dir / "img", f.images);
  write_bytes(dir / "lab", f.labels);
  const Dataset d = load_mnist_idx(dir / "img", dir / "lab");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.features(), 4u);
  EXPECT_EQ(d.num_classes, 10);
  EXPECT_EQ(d.label(0), 3);
  EXPECT_EQ(d.label(1), 7);
  EXPECT_DOUBLE_EQ(d.inputs(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(d.inputs(0, 2), 0.2);
}

TEST(Mnist, MalformedInputReportsByteOffset) {
  const auto dir = temp_dir("idx_bad");
  IdxFiles f;
  auto bad_magic = f.images;
  bad_magic[3] = 0x99;
  write_bytes(dir / "img", bad_magic);
  write_bytes(dir / "lab", f.labels);
  try {
    load_mnist_idx(dir / "img", dir / "lab");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 0u);
  }
  auto truncated = f.images;
  truncated.resize(18);
  write_bytes(dir / "img", truncated);
  try {
    load_mnist_idx(dir / "img", dir / "lab");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 18u);
  }
  write_bytes(dir / "img", f.images);
  auto bad_label = f.labels;
  bad_label[9] = 12;
  write_bytes(dir / "lab", bad_label);
  try {
    load_mnist_idx(dir / "img", dir / "lab");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 9u);
  }
}

TEST(Mnist, BundledSubsetLoads) {
  const fs::path dir = fs::path(BYZLAB_DATA_DIR) / "mnist";
  const Dataset d =
      load_mnist_idx(dir / "mnist10k-images-idx3-ubyte.gz", dir / "mnist10k-labels-idx1-ubyte.gz");
  EXPECT_EQ(d.size(), 10000u);
  EXPECT_EQ(d.features(), 784u);
  EXPECT_NO_THROW(d.validate());
  for (double f : d.class_frequencies()) EXPECT_GT(f, 0.05);
}

TEST(Tabular, ClassificationAndRegressionDetection) {
  const std::string text = "a,b,Outcome\n1,2,0\n3,4,1\n5,6,1\n";
  const Dataset c = parse_tabular_csv(text, "Outcome", false);
  EXPECT_EQ(c.num_classes, 2);
  EXPECT_EQ(c.features(), 2u);
  EXPECT_DOUBLE_EQ(c.inputs(2, 1), 6);
  const Dataset r = parse_tabular_csv("a,y\n1,0.5\n2,1.5\n", "y", false);
  EXPECT_EQ(r.num_classes, 0);
  EXPECT_THROW(parse_tabular_csv(text, "Missing", false), ParseError);
  EXPECT_THROW(parse_tabular_csv("a,Outcome\n1,x\n", "Outcome", false), ParseError);
}

TEST(Tabular, ZscoreGivesZeroMeanUnitSd) {
  Rng rng(3);
  Dataset d = random_dataset(rng, 100, 3, 2);
  for (Eigen::Index r = 0; r < 100; ++r) d.inputs(r, 1) = 5 + 10 * d.inputs(r, 1);
  zscore_features(d);
  for (Eigen::Index c = 0; c < 3; ++c) {
    const double mean = d.inputs.col(c).mean();
    const double var = (d.inputs.col(c).array() - mean).square().mean();
    EXPECT_NEAR(mean, 0, 1e-12);
    EXPECT_NEAR(var, 1, 1e-12);
  }
}

void expect_disjoint(const Partition& p, std::size_t n) {
  EXPECT_NO_THROW(p.validate(n));
  std::set<std::size_t> all;
  for (const auto& a : p.assignments) all.insert(a.begin(), a.end());
  std::size_t total = 0;
  for (const auto& a : p.assignments) total += a.size();
  EXPECT_EQ(all.size(), total);
}

TEST(Partition, IidSizesDifferByAtMostOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 50 + seed * 7;
    const int users = 3 + static_cast<int>(seed % 5);
    const Partition p = partition_iid(n, users, Rng(seed));
    ASSERT_EQ(p.users(), static_cast<std::size_t>(users));
    expect_disjoint(p, n);
    std::size_t lo = n, hi = 0, total = 0;
    for (const auto& a : p.assignments) {
      lo = std::min(lo, a.size());
      hi = std::max(hi, a.size());
      total += a.size();
    }
    EXPECT_EQ(total, n);
    EXPECT_LE(hi - lo, 1u);
  }
}

TEST(Partition, SizesAreHonored) {
  const Partition p = partition_sizes(100, {10, 20, 30}, Rng(1));
  ASSERT_EQ(p.users(), 3u);
  EXPECT_EQ(p.assignments[0].size(), 10u);
  EXPECT_EQ(p.assignments[2].size(), 30u);
  expect_disjoint(p, 100);
  EXPECT_THROW(partition_sizes(10, {6, 6}, Rng(1)), PreconditionError);
}

TEST(Partition, ByLabelPutsEachClassOnNOverKUsers) {
  // 10 balanced classes over 20 users: every user holds one label.
  Dataset d;
  d.num_classes = 10;
  d.inputs = Matrix::Zero(400, 1);
  for (int i = 0; i < 400; ++i) d.labels.push_back(i % 10);
  const Partition p = partition_by_label(d, 20);
  expect_disjoint(p, 400);
  std::vector<int> users_per_class(10, 0);
  for (const auto& a : p.assignments) {
    std::set<int> labels;
    for (auto i : a) labels.insert(d.label(i));
    ASSERT_EQ(labels.size(), 1u);
    ++users_per_class[*labels.begin()];
  }
  for (int c : users_per_class) EXPECT_EQ(c, 2);
}

TEST(Knowledge, LabelsPrefixKeepsLowLabels) {
  Rng rng(2);
  const Dataset d = random_dataset(rng, 300, 2, 10);
  const auto idx = knowledge_slice_indices(d, KnowledgeMode::kLabelsPrefix, 3, Rng(1));
  for (auto i : idx) EXPECT_LT(d.label(i), 3);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < d.size(); ++i) expected += d.label(i) < 3;
  EXPECT_EQ(idx.size(), expected);
  EXPECT_THROW(knowledge_slice_indices(d, KnowledgeMode::kLabelsPrefix, 0, Rng(1)), PreconditionError);
  EXPECT_THROW(knowledge_slice_indices(d, KnowledgeMode::kLabelsPrefix, 2.5, Rng(1)), PreconditionError);
}

TEST(Knowledge, FractionSlicesNestAndHaveRoundedSize) {
  Rng rng(2);
  const Dataset d = random_dataset(rng, 1000, 2, 10);
  std::vector<std::size_t> previous;
  for (double degree : {0.0001, 0.01, 0.1, 0.5, 1.0}) {
    const auto idx = knowledge_slice_indices(d, KnowledgeMode::kIidFraction, degree, Rng(7));
    EXPECT_EQ(idx.size(), std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(degree * 1000))));
    EXPECT_TRUE(std::includes(idx.begin(), idx.end(), previous.begin(), previous.end()));
    previous = idx;
  }
  EXPECT_THROW(knowledge_slice_indices(d, KnowledgeMode::kIidFraction, 1.5, Rng(1)), PreconditionError);
}

TEST(Split, StratifiedSplitIsDisjointAndBalanced) {
  Rng rng(5);
  const Dataset d = random_dataset(rng, 2000, 2, 4);
  const auto tv = stratified_split(d, 400, 200, Rng(3));
  EXPECT_EQ(tv.train.size(), 400u);
  EXPECT_EQ(tv.validation.size(), 200u);
  for (double f : tv.train.class_frequencies()) EXPECT_NEAR(f, 0.25, 0.01);
  const auto again = stratified_split(d, 400, 200, Rng(3));
  EXPECT_EQ(again.train.labels, tv.train.labels);
  EXPECT_THROW(stratified_split(d, 1900, 200, Rng(3)), PreconditionError);
}

TEST(Pima, SyntheticTableHasDocumentedBalance) {
  const Dataset d = make_synthetic_pima(Rng(1));
  ASSERT_EQ(d.size(), 768u);
  EXPECT_EQ(d.features(), 8u);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < d.size(); ++i) positives += d.label(i) == 1;
  EXPECT_EQ(positives, 246u);
  // The CSV form re-parses to the same table.
  const Dataset back = parse_tabular_csv(to_pima_csv(d), "Outcome", false);
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_TRUE(back.inputs.isApprox(d.inputs, 1e-12));
  EXPECT_EQ(pima_columns().back(), "Outcome");
}

TEST(Pima, FixtureFileLoads) {
  const Dataset d = load_tabular_csv(fs::path(BYZLAB_TEST_FIXTURES) / "pima_synthetic.csv", "Outcome", true);
  EXPECT_EQ(d.size(), 768u);
  EXPECT_EQ(d.num_classes, 2);
}

}  // namespace
}  // namespace byzlab::data
