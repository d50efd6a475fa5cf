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
#include "byzlab/adversary.hpp"

#include <algorithm>
#include <string>

#include "byzlab/error.hpp"

namespace byzlab::adv {

bool AttackSpec::is_adversary(int id) const {
  return std::find(adversary_ids.begin(), adversary_ids.end(), id) != adversary_ids.end();
}

void AttackSpec::validate(std::size_t param_count) const {
  if (!active()) return;
  if (adversary_ids.empty()) throw ConfigError("attack '" + std::string(to_string(kind)) + "' needs adversary ids");
  if (kind != AttackKind::kDissensus && target.size() != param_count) {
    throw DimensionError("attack target has " + std::to_string(target.size()) +
                         " entries, model has " + std::to_string(param_count));
  }
}

ParamVector state_override(const AdversaryView& view, const ParamVector& target, int n,
                           int num_adversaries) {
  if (num_adversaries < 1) throw PreconditionError("state_override: need at least one adversary");
  const auto expected = static_cast<std::size_t>(n - num_adversaries);
  if (view.visible_updates.size() != expected) {
    throw PreconditionError("state_override: view has " +
                            std::to_string(view.visible_updates.size()) +
                            " honest updates, expected " + std::to_string(expected));
  }
  ParamVector crafted = target * static_cast<double>(n);
  for (const auto& [id, u] : view.visible_updates) crafted -= u;
  crafted /= static_cast<double>(num_adversaries);
  return crafted;
}

ParamVector state_override_scc(const AdversaryView& view, double delta) {
  if (!view.victim_own_update) throw PreconditionError("state_override_scc: victim's own update missing");
  const ParamVector& own = *view.victim_own_update;
  ParamVector crafted = ParamVector::zeros(own.size());
  for (const auto& [id, u] : view.visible_updates) {
    ParamVector diff = u - own;
    const double norm = diff.norm();
    if (norm > delta) diff *= delta / norm;
    crafted -= diff;
  }
  return crafted;
}

ParamVector dissensus(const std::map<int, ParamVector>& initial_updates, int victim_id, int n) {
  const auto it = initial_updates.find(victim_id);
  if (it == initial_updates.end()) {
    throw PreconditionError("dissensus: no epoch-0 update recorded for victim " + std::to_string(victim_id));
  }
  if (n < 1) throw PreconditionError("dissensus: n must be >= 1");
  const ParamVector& own = it->second;
  ParamVector out = ParamVector::zeros(own.size());
  for (const auto& [id, u] : initial_updates) {
    if (id == victim_id) continue;
    out += own;
    out -= u;
  }
  out /= static_cast<double>(n);
  return out;
}

ParamVector build_target(TargetKind kind, const nn::ModelShape& shape, const ParamVector& base,
                         const std::map<std::size_t, double>& overrides) {
  const std::size_t p = shape.param_count();
  if (kind == TargetKind::kAllZero) return ParamVector::zeros(p);
  if (base.size() != p) {
    throw DimensionError("build_target: base has " + std::to_string(base.size()) +
                         " entries, shape has " + std::to_string(p));
  }
  ParamVector out = base;
  for (const auto& [idx, value] : overrides) {
    if (idx >= p) {
      throw PreconditionError("build_target: override index " + std::to_string(idx) +
                              " out of range for " + std::to_string(p) + " parameters");
    }
    out[idx] = value;
  }
  return out;
}

FittedUpdate fit_to_acceptance(const ParamVector& crafted, const ParamVector& anchor,
                               const std::function<bool(const ParamVector&)>& accepted,
                               int iterations) {
  auto at = [&](double s) {
    ParamVector u = anchor;
    u.add_scaled(crafted - anchor, s);
    return u;
  };
  if (accepted(crafted)) return {crafted, 1.0};
  if (!accepted(anchor)) return {anchor, 0.0};
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (accepted(at(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {at(lo), lo};
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone: return "none";
    case AttackKind::kStateOverride: return "state_override";
    case AttackKind::kStateOverrideScc: return "state_override_scc";
    case AttackKind::kDissensus: return "dissensus";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view s) {
  for (auto k : {AttackKind::kNone, AttackKind::kStateOverride, AttackKind::kStateOverrideScc,
                 AttackKind::kDissensus}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown attack '" + std::string(s) +
                    "' (none, state_override, state_override_scc, dissensus)");
}

std::string_view to_string(TargetKind kind) {
  return kind == TargetKind::kAllZero ? "all_zero" : "weight_override";
}

TargetKind parse_target_kind(std::string_view s) {
  if (s == "all_zero") return TargetKind::kAllZero;
  if (s == "weight_override") return TargetKind::kWeightOverride;
  throw ConfigError("unknown target '" + std::string(s) + "' (all_zero, weight_override)");
}

}  // namespace byzlab::adv
