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
#include "byzlab/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "byzlab/csv.hpp"
#include "byzlab/error.hpp"
#include "byzlab/presets.hpp"

namespace byzlab::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Int>
Int to_integer(std::string_view s) {
  s = trim(s);
  Int out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("expected an integer, got '" + std::string(s) + "'");
  }
  return out;
}

double to_double(std::string_view s) {
  s = trim(s);
  double out = 0;
  if (!csv::parse_double(s, out) || !std::isfinite(out)) {
    throw ConfigError("expected a finite number, got '" + std::string(s) + "'");
  }
  return out;
}

bool to_bool(std::string_view s) {
  s = trim(s);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true or false, got '" + std::string(s) + "'");
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (item.empty()) throw ConfigError("empty list item in '" + std::string(s) + "'");
    out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T, typename F>
std::vector<T> to_list(std::string_view s, F convert) {
  std::vector<T> out;
  for (auto item : split_list(s)) out.push_back(convert(item));
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format(values[i]);
  }
  return out;
}

std::string fmt(double v) { return csv::format_double(v); }

struct Key {
  std::string section;  // empty for top-level keys
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;

  std::string full() const { return section.empty() ? name : section + "." + name; }
};

std::vector<Key> build_keys() {
  using C = ExperimentConfig;
  using SV = std::string_view;
  std::vector<Key> k;

  k.push_back({"", "seed", [](const C& c) { return std::to_string(c.seed); },
               [](C& c, SV v) { c.seed = to_integer<std::uint64_t>(v); }});

  k.push_back({"topology", "kind", [](const C& c) { return std::string(sim::to_string(c.run.topology.kind)); },
               [](C& c, SV v) { c.run.topology.kind = sim::parse_topology(v); }});
  k.push_back({"topology", "n_users", [](const C& c) { return std::to_string(c.run.topology.n_users); },
               [](C& c, SV v) { c.run.topology.n_users = to_integer<int>(v); }});
  k.push_back({"topology", "exchange", [](const C& c) { return std::string(sim::to_string(c.run.exchange)); },
               [](C& c, SV v) { c.run.exchange = sim::parse_exchange(v); }});

  k.push_back({"aggregator", "kind", [](const C& c) { return std::string(agg::to_string(c.run.aggregator.kind)); },
               [](C& c, SV v) { c.run.aggregator.kind = agg::parse_evaluator_kind(v); }});
  k.push_back({"aggregator", "delta", [](const C& c) { return fmt(c.run.aggregator.delta); },
               [](C& c, SV v) { c.run.aggregator.delta = to_double(v); }});
  k.push_back({"aggregator", "delta_policy",
               [](const C& c) { return std::string(agg::to_string(c.run.aggregator.delta_policy)); },
               [](C& c, SV v) { c.run.aggregator.delta_policy = agg::parse_delta_policy(v); }});
  k.push_back({"aggregator", "f", [](const C& c) { return std::to_string(c.run.aggregator.f); },
               [](C& c, SV v) { c.run.aggregator.f = to_integer<int>(v); }});
  k.push_back({"aggregator", "eval_set_size", [](const C& c) { return std::to_string(c.run.aggregator.eval_set_size); },
               [](C& c, SV v) { c.run.aggregator.eval_set_size = to_integer<std::size_t>(v); }});

  k.push_back({"attack", "kind", [](const C& c) { return std::string(adv::to_string(c.run.attack)); },
               [](C& c, SV v) { c.run.attack = adv::parse_attack_kind(v); }});
  k.push_back({"attack", "target", [](const C& c) { return std::string(adv::to_string(c.run.target_kind)); },
               [](C& c, SV v) { c.run.target_kind = adv::parse_target_kind(v); }});
  k.push_back({"attack", "target_overrides",
               [](const C& c) {
                 std::string out;
                 for (const auto& [index, value] : c.run.target_overrides) {
                   if (!out.empty()) out += ", ";
                   out += std::to_string(index) + ":" + fmt(value);
                 }
                 return out;
               },
               [](C& c, SV v) {
                 std::map<std::size_t, double> m;
                 for (auto item : split_list(v)) {
                   const auto colon = item.find(':');
                   if (colon == SV::npos) throw ConfigError("expected index:value, got '" + std::string(item) + "'");
                   const auto index = to_integer<std::size_t>(item.substr(0, colon));
                   if (!m.emplace(index, to_double(item.substr(colon + 1))).second) {
                     throw ConfigError("index " + std::to_string(index) + " listed twice");
                   }
                 }
                 c.run.target_overrides = std::move(m);
               }});
  k.push_back({"attack", "adversary_ids",
               [](const C& c) { return join(c.run.adversary_ids, [](int i) { return std::to_string(i); }); },
               [](C& c, SV v) { c.run.adversary_ids = to_list<int>(v, to_integer<int>); }});
  k.push_back({"attack", "fit", [](const C& c) { return std::string(c.run.fit_attack ? "true" : "false"); },
               [](C& c, SV v) { c.run.fit_attack = to_bool(v); }});
  k.push_back({"attack", "observation", [](const C& c) { return std::string(sim::to_string(c.run.observation)); },
               [](C& c, SV v) { c.run.observation = sim::parse_observation(v); }});

  k.push_back({"data", "dataset", [](const C& c) { return std::string(sim::to_string(c.run.data.dataset)); },
               [](C& c, SV v) { c.run.data.dataset = sim::parse_dataset_kind(v); }});
  k.push_back({"data", "path", [](const C& c) { return c.run.data.path; },
               [](C& c, SV v) { c.run.data.path = std::string(trim(v)); }});
  k.push_back({"data", "label_column", [](const C& c) { return c.run.data.label_column; },
               [](C& c, SV v) { c.run.data.label_column = std::string(trim(v)); }});
  k.push_back({"data", "normalize", [](const C& c) { return std::string(c.run.data.normalize ? "true" : "false"); },
               [](C& c, SV v) { c.run.data.normalize = to_bool(v); }});
  k.push_back({"data", "train_size", [](const C& c) { return std::to_string(c.run.data.train_size); },
               [](C& c, SV v) { c.run.data.train_size = to_integer<std::size_t>(v); }});
  k.push_back({"data", "validation_size", [](const C& c) { return std::to_string(c.run.data.validation_size); },
               [](C& c, SV v) { c.run.data.validation_size = to_integer<std::size_t>(v); }});
  k.push_back({"data", "partition", [](const C& c) { return std::string(sim::to_string(c.run.data.partition)); },
               [](C& c, SV v) { c.run.data.partition = sim::parse_partition_kind(v); }});
  k.push_back({"data", "sizes",
               [](const C& c) { return join(c.run.data.sizes, [](std::size_t s) { return std::to_string(s); }); },
               [](C& c, SV v) { c.run.data.sizes = to_list<std::size_t>(v, to_integer<std::size_t>); }});

  k.push_back({"model", "layers",
               [](const C& c) { return join(c.run.shape.layer_sizes, [](int s) { return std::to_string(s); }); },
               [](C& c, SV v) { c.run.shape.layer_sizes = to_list<int>(v, to_integer<int>); }});
  k.push_back({"model", "activation", [](const C& c) { return std::string(nn::to_string(c.run.shape.activation)); },
               [](C& c, SV v) { c.run.shape.activation = nn::parse_activation(v); }});
  k.push_back({"model", "head", [](const C& c) { return std::string(nn::to_string(c.run.shape.output_head)); },
               [](C& c, SV v) { c.run.shape.output_head = nn::parse_output_head(v); }});

  k.push_back({"training", "optimizer", [](const C& c) { return std::string(nn::to_string(c.run.optimizer)); },
               [](C& c, SV v) { c.run.optimizer = nn::parse_optimizer(v); }});
  k.push_back({"training", "learning_rate", [](const C& c) { return fmt(c.run.learning_rate); },
               [](C& c, SV v) { c.run.learning_rate = to_double(v); }});
  k.push_back({"training", "batch_size", [](const C& c) { return std::to_string(c.run.batch_size); },
               [](C& c, SV v) { c.run.batch_size = to_integer<int>(v); }});
  k.push_back({"training", "local_steps", [](const C& c) { return std::to_string(c.run.local_steps); },
               [](C& c, SV v) { c.run.local_steps = to_integer<int>(v); }});
  k.push_back({"training", "epochs", [](const C& c) { return std::to_string(c.run.epochs); },
               [](C& c, SV v) { c.run.epochs = to_integer<int>(v); }});

  k.push_back({"eval", "every", [](const C& c) { return std::to_string(c.run.eval_every); },
               [](C& c, SV v) { c.run.eval_every = to_integer<int>(v); }});
  k.push_back({"eval", "size", [](const C& c) { return std::to_string(c.run.eval_size); },
               [](C& c, SV v) { c.run.eval_size = to_integer<std::size_t>(v); }});
  k.push_back({"eval", "train_size", [](const C& c) { return std::to_string(c.run.train_eval_size); },
               [](C& c, SV v) { c.run.train_eval_size = to_integer<std::size_t>(v); }});

  k.push_back({"games", "control_users", [](const C& c) { return std::to_string(c.control_users); },
               [](C& c, SV v) { c.control_users = to_integer<int>(v); }});
  k.push_back({"games", "control_min_fraction", [](const C& c) { return fmt(c.control_min_fraction); },
               [](C& c, SV v) { c.control_min_fraction = to_double(v); }});
  k.push_back({"games", "control_max_fraction", [](const C& c) { return fmt(c.control_max_fraction); },
               [](C& c, SV v) { c.control_max_fraction = to_double(v); }});
  k.push_back({"games", "potential_epochs", [](const C& c) { return std::to_string(c.potential_epochs); },
               [](C& c, SV v) { c.potential_epochs = to_integer<int>(v); }});
  k.push_back({"games", "evaluators",
               [](const C& c) {
                 return join(c.evaluators, [](agg::EvaluatorKind e) { return std::string(agg::to_string(e)); });
               },
               [](C& c, SV v) { c.evaluators = to_list<agg::EvaluatorKind>(v, agg::parse_evaluator_kind); }});
  k.push_back({"games", "label_degrees", [](const C& c) { return join(c.label_degrees, fmt); },
               [](C& c, SV v) { c.label_degrees = to_list<double>(v, to_double); }});
  k.push_back({"games", "fraction_degrees", [](const C& c) { return join(c.fraction_degrees, fmt); },
               [](C& c, SV v) { c.fraction_degrees = to_list<double>(v, to_double); }});
  return k;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = build_keys();
  return table;
}

const Key* find_key(std::string_view section, std::string_view name) {
  for (const auto& k : keys()) {
    if (k.section == section && k.name == name) return &k;
  }
  return nullptr;
}

bool known_section(std::string_view section) {
  for (const auto& k : keys()) {
    if (!k.section.empty() && k.section == section) return true;
  }
  return false;
}

std::string where(std::string_view source, int line) {
  std::string out(source.empty() ? "<config>" : source);
  if (line > 0) out += ":" + std::to_string(line);
  return out + ": ";
}

struct Statement {
  int line;
  std::string section;
  std::string key;
  std::string value;
};

std::vector<Statement> tokenize(std::string_view text, std::string_view source) {
  std::vector<Statement> out;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where(source, line_no) + "malformed section header '" + std::string(line) + "'");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) {
        throw ConfigError(where(source, line_no) + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where(source, line_no) + "expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(where(source, line_no) + "missing key before '='");
    out.push_back({line_no, section, key, std::string(trim(line.substr(eq + 1)))});
  }
  return out;
}

}  // namespace

games::GameConfig ExperimentConfig::game_config(sim::TopologyKind subject) const {
  games::GameConfig g;
  g.topology = subject;
  g.data = run.data;
  g.shape = run.shape;
  g.training = {run.optimizer, run.learning_rate, run.batch_size, run.epochs};
  g.potential_epochs = potential_epochs;
  g.control_users = control_users;
  g.control_min_fraction = control_min_fraction;
  g.control_max_fraction = control_max_fraction;
  g.evaluators = evaluators;
  g.seed = seed;
  return g;
}

ExperimentConfig preset_defaults(std::string_view preset) {
  const Preset& p = find_preset(preset);
  ExperimentConfig c;
  c.preset = p.name;
  if (p.defaults) p.defaults(c);
  return c;
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source,
                                   std::string_view preset_override, KeyLines* lines) {
  const auto statements = tokenize(text, source);

  std::string preset(preset_override);
  int preset_line = 0;
  for (const auto& s : statements) {
    if (!s.section.empty() || s.key != "preset") continue;
    if (preset_line) throw ConfigError(where(source, s.line) + "preset set twice");
    preset_line = s.line;
    if (s.value.empty()) throw ConfigError(where(source, s.line) + "preset: must not be empty");
    if (!preset.empty() && preset != s.value) {
      throw ConfigError(where(source, s.line) + "preset: file names '" + s.value + "' but '" + preset +
                        "' was requested");
    }
    preset = s.value;
  }
  if (preset.empty()) throw ConfigError(where(source, 0) + "preset: no preset named");

  ExperimentConfig config;
  try {
    config = preset_defaults(preset);
  } catch (const ConfigError& e) {
    throw ConfigError(where(source, preset_line) + "preset: " + e.what());
  }

  KeyLines seen;
  if (preset_line) seen["preset"] = preset_line;
  for (const auto& s : statements) {
    if (s.section.empty() && s.key == "preset") continue;
    const Key* key = find_key(s.section, s.key);
    const std::string full = s.section.empty() ? s.key : s.section + "." + s.key;
    if (!key) throw ConfigError(where(source, s.line) + "unknown key '" + full + "'");
    if (!seen.emplace(full, s.line).second) {
      throw ConfigError(where(source, s.line) + full + ": set twice (first on line " +
                        std::to_string(seen[full]) + ")");
    }
    try {
      key->set(config, s.value);
    } catch (const ConfigError& e) {
      throw ConfigError(where(source, s.line) + full + ": " + e.what());
    }
  }
  if (lines) *lines = std::move(seen);
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path, std::string_view preset_override) {
  std::string text;
  try {
    text = csv::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  KeyLines lines;
  const std::string source = path.string();
  auto config = parse_config_text(text, source, preset_override, &lines);
  validate_experiment(config, source, lines);
  return config;
}

void validate_experiment(const ExperimentConfig& config, std::string_view source, const KeyLines& lines) {
  // Library messages start with "section.key:"; attach the line that set it.
  auto rethrow = [&](const ConfigError& e, const std::string& context) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    int line = 0;
    if (colon != std::string::npos) {
      const auto it = lines.find(msg.substr(0, colon));
      if (it != lines.end()) line = it->second;
    }
    throw ConfigError(where(source, line) + msg + context);
  };

  const Preset& preset = find_preset(config.preset);
  if (preset.kind == PresetKind::kTraining) {
    for (const auto& v : expand(config)) {
      try {
        v.config.validate();
      } catch (const ConfigError& e) {
        rethrow(e, " (variant " + v.name + ")");
      }
    }
    return;
  }

  try {
    config.game_config(preset.subject).validate();
    const int classes = config.run.shape.outputs();
    for (double d : config.label_degrees) {
      if (d != std::floor(d) || d < 1 || d > classes) {
        throw ConfigError("games.label_degrees: " + fmt(d) + " is not a label count in [1, " +
                          std::to_string(classes) + "]");
      }
    }
    for (double d : config.fraction_degrees) {
      if (!(d > 0 && d <= 1)) throw ConfigError("games.fraction_degrees: " + fmt(d) + " outside (0, 1]");
    }
    if (config.label_degrees.empty() && config.fraction_degrees.empty()) {
      throw ConfigError("games.label_degrees: no knowledge degrees in either mode");
    }
  } catch (const ConfigError& e) {
    rethrow(e, "");
  }
}

std::string emit_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "preset = " << config.preset << "\n";
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      section = k.section;
      out << "\n[" << section << "]\n";
    }
    out << k.name << " = " << k.get(config) << "\n";
  }
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out{"preset"};
  for (const auto& k : keys()) out.push_back(k.full());
  return out;
}

}  // namespace byzlab::cli
