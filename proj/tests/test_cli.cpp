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
#include <fstream>
#include <set>
#include <tuple>

#include "byzlab/config.hpp"
#include "byzlab/csv.hpp"
#include "byzlab/error.hpp"
#include "byzlab/experiment.hpp"
#include "byzlab/presets.hpp"
#include "support.hpp"

namespace byzlab::cli {
namespace {

namespace fs = std::filesystem;
using byzlab::testing::temp_dir;

std::string config_error(std::string_view text, std::string_view preset = {}) {
  try {
    KeyLines lines;
    const auto c = parse_config_text(text, "test.ini", preset, &lines);
    validate_experiment(c, "test.ini", lines);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Config, PresetOnlyGivesPresetDefaults) {
  for (const auto& p : presets()) {
    const auto parsed = parse_config_text("preset = " + p.name + "\n", "x");
    EXPECT_EQ(emit_config(parsed), emit_config(preset_defaults(p.name))) << p.name;
  }
}

TEST(Config, EmitReparseIsIdentity) {
  for (const auto& p : presets()) {
    ExperimentConfig c = preset_defaults(p.name);
    c.seed = 77;
    c.run.target_overrides = {{3, 0.25}, {10, -1.5}};
    const std::string text = emit_config(c);
    EXPECT_EQ(emit_config(parse_config_text(text, "x")), text) << p.name;
  }
}

TEST(Config, EveryPresetValidates) {
  for (const auto& p : presets()) EXPECT_NO_THROW(validate_experiment(preset_defaults(p.name))) << p.name;
}

TEST(Config, NegativeDeltaNamesKeyAndLine) {
  EXPECT_EQ(config_error("preset = fig2-mnist-iid\n\n[aggregator]\ndelta = -1\n"),
            "test.ini:4: aggregator.delta: delta must be >= 0 (variant scc)");
}

TEST(Config, SyntaxAndTypeErrorsNameTheLine) {
  EXPECT_EQ(config_error("preset = fig8-health\n[training]\nbogus = 1\n"), "test.ini:3: unknown key 'training.bogus'");
  EXPECT_EQ(config_error("preset = fig8-health\n[nosuch]\n"), "test.ini:2: unknown section [nosuch]");
  EXPECT_EQ(config_error("preset = fig8-health\n[training]\nepochs = ten\n"),
            "test.ini:3: training.epochs: expected an integer, got 'ten'");
  EXPECT_EQ(config_error("preset = fig8-health\n[data]\nnormalize = yes\n"),
            "test.ini:3: data.normalize: expected true or false, got 'yes'");
  EXPECT_EQ(config_error("preset = fig8-health\n[topology]\nkind = ring\n"),
            "test.ini:3: topology.kind: unknown topology 'ring' (star, complete)");
  EXPECT_EQ(config_error("preset = fig8-health\n[training]\nepochs = 2\nepochs = 3\n"),
            "test.ini:4: training.epochs: set twice (first on line 3)");
  EXPECT_EQ(config_error("preset = fig8-health\njunk\n"), "test.ini:2: expected 'key = value', got 'junk'");
  EXPECT_EQ(config_error("[training]\nepochs = 2\n"), "test.ini: preset: no preset named");
}

TEST(Config, ConstraintErrorsPointAtTheKeyThatCausedThem) {
  EXPECT_EQ(config_error("preset = fig8-health\n[attack]\nadversary_ids = 8, 10\n"),
            "test.ini:3: attack.adversary_ids: id 10 outside [0, 10) (variant scc)");
  EXPECT_EQ(config_error("preset = fig6-knowledge-p2p\n[games]\nlabel_degrees = 0\n"),
            "test.ini:3: games.label_degrees: 0 is not a label count in [1, 10]");
}

TEST(Config, PresetOverride) {
  EXPECT_EQ(config_error("[training]\nepochs = 2\n", "fig8-health"), "");
  EXPECT_EQ(config_error("preset = fig8-health\n", "fig3-delta-sweep"),
            "test.ini:1: preset: file names 'fig8-health' but 'fig3-delta-sweep' was requested");
  EXPECT_NE(config_error("preset = nope\n").find("available: baseline-mnist-iid"), std::string::npos);
}

TEST(Config, OverridesApplyOnTopOfPreset) {
  const auto c = parse_config_text(
      "preset = fig3-delta-sweep\nseed = 9\n[training]\nepochs = 4\n[attack]\ntarget = weight_override\n"
      "target_overrides = 1:0.5, 2:-3\n",
      "x");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.run.epochs, 4);
  EXPECT_EQ(c.run.topology.n_users, 20);
  EXPECT_EQ(c.run.target_overrides, (std::map<std::size_t, double>{{1, 0.5}, {2, -3}}));
}

TEST(Config, EveryKeyIsDocumented) {
  const std::string doc = csv::read_file(fs::path(BYZLAB_SOURCE_DIR) / "docs" / "config.md");
  for (const auto& key : config_keys()) {
    const auto dot = key.find('.');
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    EXPECT_NE(doc.find("`" + name + "`"), std::string::npos) << key;
    if (dot != std::string::npos) EXPECT_NE(doc.find("[" + key.substr(0, dot) + "]"), std::string::npos) << key;
  }
}

TEST(Presets, VariantsMatchTheirFigures) {
  auto names = [](const std::string& preset) {
    std::vector<std::string> out;
    for (const auto& v : expand(preset_defaults(preset))) out.push_back(v.name);
    return out;
  };
  EXPECT_EQ(names("fig2-mnist-iid"), (std::vector<std::string>{"scc", "mkrum", "rofl"}));
  EXPECT_EQ(names("fig3-delta-sweep"), (std::vector<std::string>{"d0.5-benign", "d0.5-attack", "d1-benign",
                                                                 "d1-attack", "d5-benign", "d5-attack"}));
  EXPECT_EQ(names("fig5-dissensus"), (std::vector<std::string>{"baseline", "attack"}));
  EXPECT_TRUE(names("fig6-knowledge-p2p").empty());

  for (const auto& v : expand(preset_defaults("fig2-mnist-noniid"))) {
    EXPECT_EQ(v.config.topology.n_users, 20);
    EXPECT_EQ(v.config.adversary_ids, (std::vector<int>{18, 19}));
    EXPECT_EQ(v.config.data.partition, sim::PartitionKind::kByLabel);
  }
  const auto sweep = expand(preset_defaults("fig3-delta-sweep"));
  EXPECT_EQ(sweep[0].config.aggregator.delta, 0.5);
  EXPECT_EQ(sweep[5].config.aggregator.delta, 5.0);
  EXPECT_EQ(sweep[0].config.attack, adv::AttackKind::kNone);
  EXPECT_EQ(sweep[1].config.attack, adv::AttackKind::kStateOverrideScc);
  EXPECT_THROW(find_preset("fig4"), ConfigError);
}

ExperimentConfig quick_health() {
  ExperimentConfig c = preset_defaults("fig8-health");
  c.run.epochs = 5;
  return c;
}

TEST(Experiment, RunWritesReproducibleOutputs) {
  const auto a = temp_dir("run_a");
  const auto b = temp_dir("run_b");
  const ExperimentConfig c = quick_health();
  run_experiment(c, a);
  run_experiment(c, b);
  for (const char* f : {"metrics.csv", "config.ini", "summary.txt", "predictions_scc.csv", "predictions_mkrum.csv",
                        "predictions_rofl.csv"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(csv::read_file(a / f), csv::read_file(b / f)) << f;
  }
  EXPECT_EQ(emit_config(parse_config(a / "config.ini")), emit_config(c));

  const auto metrics = csv::read_table(a / "metrics.csv");
  EXPECT_EQ(metrics.header,
            (std::vector<std::string>{"preset", "variant", "seed", "epoch", "scope", "metric", "value"}));
  std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
  for (const auto& r : metrics.rows) {
    EXPECT_TRUE(seen.insert({r[1], r[3], r[4], r[5]}).second) << "duplicate row";
    double v = 0;
    EXPECT_TRUE(csv::parse_double(r[6], v));
    EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Experiment, PlotTablesAreWideAndIdempotent) {
  const auto dir = temp_dir("plot");
  run_experiment(quick_health(), dir);
  const auto path = emit_plotdata(dir, "fig8");
  const std::string first = csv::read_file(path);
  EXPECT_EQ(csv::read_file(emit_plotdata(dir, "fig8")), first);
  const auto t = csv::read_table(path);
  EXPECT_EQ(t.header, (std::vector<std::string>{"epoch", "scc_err", "mkrum_err", "rofl_err"}));
  EXPECT_EQ(t.rows.size(), 5u);
  const auto fig2 = plot_table(dir, "fig2");
  EXPECT_EQ(fig2.header, (std::vector<std::string>{"epoch", "scc_acc", "mkrum_acc", "rofl_acc", "scc_dist",
                                                   "mkrum_dist", "rofl_dist"}));
  const auto fig9 = plot_table(dir, "fig9");
  EXPECT_EQ(fig9.header, (std::vector<std::string>{"class", "ground_truth", "scc", "mkrum", "rofl"}));
}

TEST(Experiment, PlotErrorsWriteNothing) {
  const auto dir = temp_dir("plot_err");
  {
    std::ofstream(dir / "metrics.csv") << "";
  }
  EXPECT_THROW(emit_plotdata(dir, "fig2"), Error);
  EXPECT_FALSE(fs::exists(dir / "plotdata_fig2.csv"));

  ExperimentConfig c = preset_defaults("fig5-dissensus");
  csv::write_table(dir / "metrics.csv", metrics_table(c, {{"baseline", 1, "honest_mean", "dynamic_delta_mean", 2.0}}));
  try {
    emit_plotdata(dir, "fig5");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing series 'attack_delta'"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(fs::exists(dir / "plotdata_fig5.csv"));
  EXPECT_THROW(emit_plotdata(dir, "fig42"), ConfigError);
}

TEST(Experiment, NonFiniteMetricIsRejected) {
  const ExperimentConfig c = preset_defaults("fig5-dissensus");
  EXPECT_THROW(metrics_table(c, {{"baseline", 1, "honest_mean", "x", std::nan("")}}), Error);
}

TEST(Experiment, KnowledgePlotFromMetrics) {
  const auto dir = temp_dir("knowledge");
  const ExperimentConfig c = preset_defaults("fig7-knowledge-server");
  std::vector<MetricRow> rows;
  for (const char* v : {"labels_prefix:1", "iid_fraction:0.5"}) {
    for (const char* m : {"learning_potential", "rd_svm_hinge_accuracy", "rd_svm_hinge_fpr",
                          "err_rejection_accuracy", "err_rejection_fpr"}) {
      rows.push_back({v, 20, "server", m, 0.25});
    }
  }
  csv::write_table(dir / "metrics.csv", metrics_table(c, rows));
  const auto t = plot_table(dir, "fig7");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "iid_fraction");
  EXPECT_EQ(t.rows[1][0], "labels_prefix");
  EXPECT_EQ(t.header.size(), 7u);
}

}  // namespace
}  // namespace byzlab::cli
