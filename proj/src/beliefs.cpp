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

#include "spml/beliefs.hpp"

#include <algorithm>
#include <cmath>

#include "overloaded.hpp"
#include "spml/error.hpp"

namespace spml {
namespace {

using detail::overloaded;

Distribution shift_toward(double delta, const Distribution& prv, const Distribution& pub) {
  if (prv.size() != 2 || pub.size() != 2) {
    fail(ErrorCode::kUnsupported, "shift_toward merge is defined for two outcomes only");
  }
  if (std::abs(pub[0] - pub[1]) <= Distribution::kTolerance) return prv;
  const std::size_t favoured = pub[0] > pub[1] ? 0 : 1;
  const double raised = std::clamp(prv[favoured] + delta, kShiftClamp, 1.0 - kShiftClamp);
  std::vector<double> probs(2);
  probs[favoured] = raised;
  probs[1 - favoured] = 1.0 - raised;
  return Distribution(std::move(probs));
}

}  // namespace

void validate(const MergeRule& rule) {
  std::visit(overloaded{
                 [](const PrivateOnly&) {},
                 [](const ShiftToward& s) {
                   if (!(s.delta > 0.0 && s.delta < 1.0)) {
                     fail(ErrorCode::kDomain, "shift_toward delta must lie in (0, 1)");
                   }
                 },
                 [](const ConvexMix& m) {
                   if (!(m.lambda >= 0.0 && m.lambda <= 1.0)) {
                     fail(ErrorCode::kDomain, "convex_mix lambda must lie in [0, 1]");
                   }
                 },
             },
             rule);
}

Distribution resolve_public_signal(const AgentType& agent,
                                   const Distribution& market_current_estimate) {
  return std::visit(overloaded{
                        [](const ExogenousSignal& s) { return s.estimate; },
                        [&](const MarketEstimateSignal&) { return market_current_estimate; },
                    },
                    agent.public_source);
}

Distribution merge(const MergeRule& rule, const Distribution& private_signal,
                   const Distribution& public_signal) {
  validate(rule);
  if (private_signal.size() != public_signal.size()) {
    fail(ErrorCode::kDomain, "private and public signals differ in outcome count");
  }
  return std::visit(
      overloaded{
          [&](const PrivateOnly&) { return private_signal; },
          [&](const ShiftToward& s) { return shift_toward(s.delta, private_signal, public_signal); },
          [&](const ConvexMix& m) {
            std::vector<double> probs(private_signal.size());
            for (std::size_t i = 0; i < probs.size(); ++i) {
              probs[i] = m.lambda * private_signal[i] + (1.0 - m.lambda) * public_signal[i];
            }
            return Distribution(std::move(probs));
          },
      },
      rule);
}

Distribution form_true_belief(const AgentType& agent, const EstimateSupplier& current_estimate) {
  if (!agent.believes_nni) return agent.private_signal;
  const Distribution pub = std::visit(overloaded{
                                          [](const ExogenousSignal& s) { return s.estimate; },
                                          [&](const MarketEstimateSignal&) { return current_estimate(); },
                                      },
                                      agent.public_source);
  return merge(agent.merge, agent.private_signal, pub);
}

Distribution form_true_belief(const AgentType& agent, const Distribution& market_current_estimate) {
  return form_true_belief(agent, [&] { return market_current_estimate; });
}

bool nni_holds(const ScoringRuleSpec& rule, const Distribution& belief,
               const Distribution& private_signal, const Distribution& nature) {
  return discrepancy(rule, belief, nature) <= discrepancy(rule, private_signal, nature) + 1e-12;
}

}  // namespace spml
