// Copyright 2026 The spml Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <functional>
#include <string>
#include <variant>

#include "spml/distribution.hpp"
#include "spml/scoring.hpp"

namespace spml {

/// Opaque agent identity. Identities are trusted; no Sybil modelling.
struct AgentId {
  std::string value;

  friend auto operator<=>(const AgentId&, const AgentId&) = default;
};

/// Identity recorded on the maker's seq-0 ledger entry.
inline const AgentId kMakerId{"maker"};

/// Public signal fixed in advance, independent of the market.
struct ExogenousSignal {
  Distribution estimate;
};
/// Public signal equal to the market's current estimate when the agent arrives.
struct MarketEstimateSignal {};

using PublicSignalSource = std::variant<ExogenousSignal, MarketEstimateSignal>;

struct PrivateOnly {};
/// Two-outcome merge: move `delta` of mass toward the outcome favoured by the
/// public signal. Identity when the public signal is uniform.
struct ShiftToward {
  double delta = 0.1;
};
/// lambda * private + (1 - lambda) * public.
struct ConvexMix {
  double lambda = 0.5;
};

using MergeRule = std::variant<PrivateOnly, ShiftToward, ConvexMix>;

/// Entries of a ShiftToward result are kept within [kShiftClamp, 1 - kShiftClamp].
inline constexpr double kShiftClamp = 1e-6;

/// An agent's private type: private signal, public signal source, merging
/// function, and whether it trusts its public signal (non-negative influence).
struct AgentType {
  AgentId id;
  Distribution private_signal = Distribution::uniform(2);
  PublicSignalSource public_source = MarketEstimateSignal{};
  MergeRule merge;
  bool believes_nni = true;
};

void validate(const MergeRule& rule);

Distribution resolve_public_signal(const AgentType& agent,
                                   const Distribution& market_current_estimate);

Distribution merge(const MergeRule& rule, const Distribution& private_signal,
                   const Distribution& public_signal);

/// Supplies the market's current estimate on demand.
using EstimateSupplier = std::function<Distribution()>;

/// Final belief per the agent's type. Agents that do not trust their public
/// signal keep their private signal and never consult `current_estimate`.
Distribution form_true_belief(const AgentType& agent, const EstimateSupplier& current_estimate);
Distribution form_true_belief(const AgentType& agent, const Distribution& market_current_estimate);

/// D(s, p, p_nat) <= D(s, p_prv, p_nat), evaluated as written.
bool nni_holds(const ScoringRuleSpec& rule, const Distribution& belief,
               const Distribution& private_signal, const Distribution& nature);

}  // namespace spml
