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
#ifndef BYZLAB_ADVERSARY_HPP_
#define BYZLAB_ADVERSARY_HPP_

// Crafted updates for an omniscient Byzantine participant that sees every
// honest update of the epoch before sending its own.

#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "byzlab/nn.hpp"
#include "byzlab/param_vector.hpp"

namespace byzlab::adv {

enum class AttackKind { kNone, kStateOverride, kStateOverrideScc, kDissensus };

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
  ParamVector target;             // target model weights
  std::vector<int> adversary_ids;

  bool active() const { return kind != AttackKind::kNone; }
  bool is_adversary(int id) const;
  /// Throws unless adversaries are named for an active attack and the target
  /// has `param_count` entries.
  void validate(std::size_t param_count) const;
};

struct AdversaryView {
  std::map<int, ParamVector> visible_updates;  // honest senders only
  std::optional<ParamVector> victim_own_update;
  int epoch = 0;
};

/// Update that makes the mean of {honest updates, crafted copies} equal
/// `target` exactly: (n * target - sum(honest)) / num_adversaries. Needs the
/// n - num_adversaries honest updates in the view.
ParamVector state_override(const AdversaryView& view, const ParamVector& target, int n,
                           int num_adversaries = 1);

/// Negated sum of the honest deviations as the victim clips them:
/// -sum_j min(1, delta / ||theta_j - theta_i||) (theta_j - theta_i).
ParamVector state_override_scc(const AdversaryView& view, double delta);

/// sum_{j != victim} (1/n) (theta_victim^0 - theta_j^0) over the epoch-0
/// updates.
ParamVector dissensus(const std::map<int, ParamVector>& initial_updates, int victim_id, int n);

enum class TargetKind { kAllZero, kWeightOverride };

/// all_zero: the zero vector. weight_override: `base` with the listed
/// coordinates replaced.
ParamVector build_target(TargetKind kind, const nn::ModelShape& shape, const ParamVector& base,
                         const std::map<std::size_t, double>& overrides);

/// Largest s in [0, 1] (to `iterations` bisection steps) such that
/// anchor + s * (crafted - anchor) is accepted, and that point. Returns the
/// anchor itself when even s = 0 fails and crafted when s = 1 passes.
struct FittedUpdate {
  ParamVector update;
  double scale = 0.0;
};
FittedUpdate fit_to_acceptance(const ParamVector& crafted, const ParamVector& anchor,
                               const std::function<bool(const ParamVector&)>& accepted,
                               int iterations = 40);

std::string_view to_string(AttackKind kind);
AttackKind parse_attack_kind(std::string_view s);
std::string_view to_string(TargetKind kind);
TargetKind parse_target_kind(std::string_view s);

}  // namespace byzlab::adv

#endif  // BYZLAB_ADVERSARY_HPP_
