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
#include "byzlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "byzlab/error.hpp"
#include "byzlab/presets.hpp"

namespace byzlab::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kMetricsHeader{"preset", "variant", "seed", "epoch", "scope", "metric", "value"};
constexpr std::string_view kHonestMean = "honest_mean";

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void emit(const Log& log, const std::string& line) {
  if (log) log(line);
}

std::string summary_text(const ExperimentConfig& config, const std::vector<MetricRow>& rows) {
  // Last value per (variant, scope, metric), variants in first-seen order.
  std::vector<std::string> order;
  std::map<std::string, std::map<std::string, std::pair<int, double>>> last;
  for (const auto& r : rows) {
    if (r.metric == "accepted_count" && r.scope.rfind("user:", 0) == 0) continue;
    if (!last.count(r.variant)) order.push_back(r.variant);
    last[r.variant][r.scope == kHonestMean ? r.metric : r.scope + "/" + r.metric] = {r.epoch, r.value};
  }
  std::ostringstream out;
  out << "preset: " << config.preset << "\nseed: " << config.seed << "\n";
  for (const auto& v : order) {
    out << "\n[" << v << "]\n";
    for (const auto& [metric, value] : last[v]) {
      out << metric << " = " << csv::format_double(value.second) << " (epoch " << value.first << ")\n";
    }
  }
  return out.str();
}

std::vector<MetricRow> run_training(const ExperimentConfig& config, const Preset& preset, const fs::path& out_dir,
                                    std::vector<fs::path>& files, const Log& log) {
  std::vector<MetricRow> rows;
  for (const auto& variant : expand(config)) {
    emit(log, "variant " + variant.name + ": " + std::to_string(variant.config.epochs) + " epochs");
    const auto inputs = sim::build_inputs(variant.config);
    sim::RunOptions options;
    options.observer = [&](const sim::EpochTrace& t) {
      std::string line = "  epoch " + std::to_string(t.epoch);
      for (const char* m : {"accuracy", "distance_to_target", "dynamic_delta_mean"}) {
        if (auto it = t.metrics.find(m); it != t.metrics.end()) {
          line += std::string(" ") + m + "=" + csv::format_double(it->second);
        }
      }
      emit(log, line);
    };
    const auto result = sim::run(variant.config, inputs, options);
    auto variant_rows = metric_rows(variant.name, result.traces);
    rows.insert(rows.end(), variant_rows.begin(), variant_rows.end());

    if (preset.dump_predictions) {
      int honest = 0;
      while (std::count(variant.config.adversary_ids.begin(), variant.config.adversary_ids.end(), honest)) ++honest;
      const nn::Model& model = sim::honest_model(result.final_state, variant.config, honest);
      const auto predicted = nn::predict(model, inputs.validation.inputs);
      csv::Table table{{"index", "ground_truth", "prediction"}, {}};
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        table.rows.push_back({std::to_string(i), std::to_string(inputs.validation.label(i)),
                              std::to_string(predicted[i])});
      }
      const fs::path path = out_dir / ("predictions_" + variant.name + ".csv");
      csv::write_table(path, table);
      files.push_back(path);
    }
  }
  return rows;
}

std::vector<MetricRow> run_knowledge(const ExperimentConfig& config, const Preset& preset, const Log& log) {
  const auto game = config.game_config(preset.subject);
  std::vector<games::KnowledgePoint> points;
  for (double d : config.label_degrees) points.push_back({data::KnowledgeMode::kLabelsPrefix, d});
  for (double d : config.fraction_degrees) points.push_back({data::KnowledgeMode::kIidFraction, d});

  const bool server = preset.subject == sim::TopologyKind::kStar;
  const std::string scope = server ? "server" : "user:" + std::to_string(config.control_users);
  std::vector<MetricRow> rows;
  for (const auto& point : points) {
    const std::string variant =
        std::string(data::to_string(point.mode)) + ":" + csv::format_double(point.degree);
    emit(log, "knowledge " + variant);
    const std::vector<games::KnowledgePoint> one{point};
    const auto sweep = server ? games::server_mode_sweep(game, one) : games::play_rind_sweep(game, one);
    const auto& p = sweep.front();
    const int epoch = game.training.epochs;
    rows.push_back({variant, epoch, scope, "subject_samples", static_cast<double>(p.subject_samples)});
    rows.push_back({variant, epoch, scope, "learning_potential", p.potential.potential});
    for (const auto& r : p.reports) {
      const std::string ev(agg::to_string(r.evaluator));
      rows.push_back({variant, epoch, scope, ev + "_accuracy", r.accuracy});
      rows.push_back({variant, epoch, scope, ev + "_fpr", r.fpr});
      emit(log, "  " + ev + " accuracy=" + csv::format_double(r.accuracy) + " fpr=" + csv::format_double(r.fpr) +
                    " potential=" + csv::format_double(p.potential.potential));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Plot data

using SeriesKey = std::tuple<std::string, std::string, std::string>;  // variant, scope, metric
using Series = std::map<SeriesKey, std::map<int, double>>;

Series load_metrics(const fs::path& run_dir) {
  const fs::path path = run_dir / "metrics.csv";
  if (!fs::exists(path)) throw Error(path.string() + ": not found");
  const auto table = csv::read_table(path);
  if (table.header != kMetricsHeader) throw Error(path.string() + ": unexpected header");
  if (table.rows.empty()) throw Error(path.string() + ": no metric rows");
  Series out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    double value = 0;
    int epoch = 0;
    const auto& e = row[3];
    const auto [ptr, ec] = std::from_chars(e.data(), e.data() + e.size(), epoch);
    if (ec != std::errc() || ptr != e.data() + e.size() || !csv::parse_double(row[6], value)) {
      throw ParseError(path.string() + ":" + std::to_string(i + 2) + ": malformed row", i + 2);
    }
    out[{row[1], row[4], row[5]}][epoch] = value;
  }
  return out;
}

struct Column {
  std::string name;
  std::string variant;
  std::string metric;
};

// One row per epoch at which every column has a value.
csv::Table by_epoch(const Series& series, const std::vector<Column>& columns) {
  std::vector<const std::map<int, double>*> found;
  for (const auto& c : columns) {
    auto it = series.find({c.variant, std::string(kHonestMean), c.metric});
    if (it == series.end()) {
      throw Error("missing series '" + c.name + "' (variant " + c.variant + ", metric " + c.metric + ")");
    }
    found.push_back(&it->second);
  }
  csv::Table table;
  table.header.push_back("epoch");
  for (const auto& c : columns) table.header.push_back(c.name);
  for (const auto& [epoch, unused] : *found.front()) {
    std::vector<std::string> row{std::to_string(epoch)};
    for (const auto* s : found) {
      auto it = s->find(epoch);
      if (it == s->end()) break;
      row.push_back(csv::format_double(it->second));
    }
    if (row.size() == columns.size() + 1) table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw Error("series share no epoch");
  return table;
}

csv::Table fig2(const Series& s) {
  std::vector<Column> cols;
  for (const char* v : {"scc", "mkrum", "rofl"}) cols.push_back({std::string(v) + "_acc", v, "accuracy"});
  for (const char* v : {"scc", "mkrum", "rofl"}) cols.push_back({std::string(v) + "_dist", v, "distance_to_target"});
  return by_epoch(s, cols);
}

csv::Table fig3(const Series& s) {
  std::vector<Column> cols;
  for (const char* d : {"d0.5", "d1", "d5"}) {
    for (const char* kind : {"benign", "attack"}) {
      const std::string v = std::string(d) + "-" + kind;
      const std::string base = std::string(d) + "_" + kind;
      cols.push_back({base + "_acc", v, "accuracy"});
      cols.push_back({base + "_loss", v, "train_loss"});
      cols.push_back({base + "_dist", v, "distance_to_target"});
    }
  }
  return by_epoch(s, cols);
}

csv::Table fig5(const Series& s) {
  return by_epoch(s, {{"baseline_delta", "baseline", "dynamic_delta_mean"},
                      {"attack_delta", "attack", "dynamic_delta_mean"}});
}

csv::Table fig8(const Series& s) {
  return by_epoch(s, {{"scc_err", "scc", "error_rate"}, {"mkrum_err", "mkrum", "error_rate"},
                      {"rofl_err", "rofl", "error_rate"}});
}

// One row per knowledge point, in mode then degree order.
csv::Table knowledge(const Series& s) {
  struct Point {
    std::string mode;
    double degree;
    std::string variant;
    std::string scope;
    bool operator<(const Point& o) const { return std::tie(mode, degree) < std::tie(o.mode, o.degree); }
  };
  std::set<Point> points;
  for (const auto& [key, values] : s) {
    const auto& [variant, scope, metric] = key;
    const auto colon = variant.find(':');
    double degree = 0;
    if (colon == std::string::npos || !csv::parse_double(std::string_view(variant).substr(colon + 1), degree)) {
      continue;
    }
    points.insert({variant.substr(0, colon), degree, variant, scope});
  }
  if (points.empty()) throw Error("missing series 'learning_potential' (no knowledge points)");

  const std::vector<std::string> metrics{"learning_potential", "rd_svm_hinge_accuracy", "rd_svm_hinge_fpr",
                                         "err_rejection_accuracy", "err_rejection_fpr"};
  csv::Table table{{"mode", "degree"}, {}};
  table.header.insert(table.header.end(), metrics.begin(), metrics.end());
  for (const auto& p : points) {
    std::vector<std::string> row{p.mode, csv::format_double(p.degree)};
    for (const auto& m : metrics) {
      auto it = s.find({p.variant, p.scope, m});
      if (it == s.end() || it->second.empty()) {
        throw Error("missing series '" + m + "' (variant " + p.variant + ")");
      }
      row.push_back(csv::format_double(it->second.rbegin()->second));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Predicted-class histogram per variant next to the ground truth.
csv::Table fig9(const fs::path& run_dir) {
  const std::vector<std::string> variants{"scc", "mkrum", "rofl"};
  std::map<int, std::map<std::string, int>> counts;
  for (const auto& v : variants) {
    const fs::path path = run_dir / ("predictions_" + v + ".csv");
    if (!fs::exists(path)) throw Error("missing series '" + v + "' (" + path.string() + " not found)");
    const auto table = csv::read_table(path);
    const int truth = table.column("ground_truth");
    const int pred = table.column("prediction");
    if (truth < 0 || pred < 0 || table.rows.empty()) throw Error(path.string() + ": not a prediction dump");
    for (const auto& row : table.rows) {
      counts[std::stoi(row[pred])][v] += 1;
      if (v == variants.front()) counts[std::stoi(row[truth])]["ground_truth"] += 1;
    }
  }
  csv::Table table{{"class", "ground_truth"}, {}};
  for (const auto& v : variants) table.header.push_back(v);
  for (const auto& [cls, by] : counts) {
    std::vector<std::string> row{std::to_string(cls)};
    for (std::size_t i = 1; i < table.header.size(); ++i) {
      auto it = by.find(table.header[i]);
      row.push_back(std::to_string(it == by.end() ? 0 : it->second));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

std::vector<MetricRow> metric_rows(const std::string& variant, const std::vector<sim::EpochTrace>& traces) {
  std::vector<MetricRow> rows;
  for (const auto& t : traces) {
    for (const auto& [metric, value] : t.metrics) {
      rows.push_back({variant, t.epoch, std::string(kHonestMean), metric, value});
    }
    for (const auto& [scope, outcome] : t.outcomes) {
      if (outcome.accepted.empty()) continue;
      rows.push_back({variant, t.epoch, scope, "accepted_count", static_cast<double>(outcome.accepted_count())});
    }
  }
  return rows;
}

csv::Table metrics_table(const ExperimentConfig& config, const std::vector<MetricRow>& rows) {
  csv::Table table{kMetricsHeader, {}};
  const std::string seed = std::to_string(config.seed);
  for (const auto& r : rows) {
    if (!std::isfinite(r.value)) {
      throw Error("non-finite " + r.metric + " for variant " + r.variant + " at epoch " + std::to_string(r.epoch));
    }
    table.rows.push_back(
        {config.preset, r.variant, seed, std::to_string(r.epoch), r.scope, r.metric, csv::format_double(r.value)});
  }
  return table;
}

std::vector<fs::path> run_experiment(const ExperimentConfig& config, const fs::path& out_dir, const Log& log) {
  const Preset& preset = find_preset(config.preset);
  validate_experiment(config);
  fs::create_directories(out_dir);

  std::vector<fs::path> files;
  const fs::path config_path = out_dir / "config.ini";
  write_text(config_path, emit_config(config));
  files.push_back(config_path);

  const auto rows = preset.kind == PresetKind::kTraining ? run_training(config, preset, out_dir, files, log)
                                                         : run_knowledge(config, preset, log);

  const fs::path metrics_path = out_dir / "metrics.csv";
  csv::write_table(metrics_path, metrics_table(config, rows));
  files.push_back(metrics_path);

  const fs::path summary_path = out_dir / "summary.txt";
  write_text(summary_path, summary_text(config, rows));
  files.push_back(summary_path);
  return files;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9"};
  return ids;
}

csv::Table plot_table(const fs::path& run_dir, std::string_view figure) {
  if (figure == "fig9") return fig9(run_dir);
  if (figure == "fig2") return fig2(load_metrics(run_dir));
  if (figure == "fig3") return fig3(load_metrics(run_dir));
  if (figure == "fig5") return fig5(load_metrics(run_dir));
  if (figure == "fig6" || figure == "fig7") return knowledge(load_metrics(run_dir));
  if (figure == "fig8") return fig8(load_metrics(run_dir));
  std::string ids;
  for (const auto& id : figure_ids()) ids += (ids.empty() ? "" : ", ") + id;
  throw ConfigError("unknown figure '" + std::string(figure) + "' (available: " + ids + ")");
}

fs::path emit_plotdata(const fs::path& run_dir, std::string_view figure) {
  const auto table = plot_table(run_dir, figure);
  const fs::path path = run_dir / ("plotdata_" + std::string(figure) + ".csv");
  csv::write_table(path, table);
  return path;
}

}  // namespace byzlab::cli
