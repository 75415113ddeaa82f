// Copyright 2026 The OSPLab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exhaustive checkers for weak and obvious dominance over finite game forms.
//
// Every check reports a gap: the largest amount by which the deviation side
// exceeds the intended side over all constraints of the notion. A strategy is
// epsilon-dominant iff gap <= epsilon + kComparisonSlack.

#ifndef OSPLAB_DOMINANCE_H_
#define OSPLAB_DOMINANCE_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "osplab/game_form.h"

namespace osplab {

inline constexpr double kComparisonSlack = 1e-9;

// Utility of `agent` of type `type` when play ends at `terminal`.
using UtilityModel = std::function<double(int agent, int type, NodeId terminal)>;

// Reads v_i(type, g(terminal)) from a valuation table.
UtilityModel UtilityFromValuations(const GameForm& game,
                                   const ValuationTable& valuations);

enum class DominanceMode { kPerRealization, kExpectation };

enum class Notion { kSP, kOSP, kSPExpectation, kOSPExpectation };

std::string NotionName(Notion notion);
// Accepts "sp", "osp", "sp-exp", "osp-exp".
Notion ParseNotion(const std::string& text);

struct Counterexample {
  Strategy deviation;
  int info_set = -1;  // -1 for weak dominance
  // Witness attaining the intended side's value, and the deviation side's.
  // In expectation notions the chance field is empty and its probability
  // holds the mass of the conditioning event.
  Witness lhs;
  Witness rhs;
  double lhs_value = 0.0;
  double rhs_value = 0.0;
};

struct DominanceVerdict {
  bool holds = true;
  // Max over constraints of (deviation side - intended side); -infinity when
  // the notion imposes no constraint at all.
  double gap = 0.0;
  std::optional<Counterexample> counterexample;  // present iff !holds
};

DominanceVerdict IsWeaklyDominant(const StrategySpace& space, int agent, int type,
                                  const Strategy& intended,
                                  const UtilityModel& utility, double epsilon,
                                  DominanceMode mode);

DominanceVerdict IsObviouslyDominant(const StrategySpace& space, int agent,
                                     int type, const Strategy& intended,
                                     const UtilityModel& utility, double epsilon);

// Conditions chance on the witnessing realizations of each (information set,
// opponent profile). Throws Error("unreachable information set ...") if a
// witnessing opponent profile only witnesses with probability zero.
DominanceVerdict IsObviouslyDominantInExpectation(const StrategySpace& space,
                                                  int agent, int type,
                                                  const Strategy& intended,
                                                  const UtilityModel& utility,
                                                  double epsilon);

// The designer's intended strategy for every (agent, type).
struct SignallingMap {
  std::vector<std::vector<Strategy>> strategies;  // [agent][type]

  const Strategy& at(int agent, int type) const { return strategies[agent][type]; }
};

struct CellVerdict {
  int agent = 0;
  int type = 0;
  DominanceVerdict verdict;
};

struct MechanismVerdict {
  Notion notion = Notion::kOSP;
  double epsilon = 0.0;
  std::vector<CellVerdict> cells;  // agent-major, then type
  bool holds = true;
  // For obvious notions: every cell that is obviously dominant was also
  // found weakly dominant in the same mode. Always true for SP notions.
  bool implies_sp = true;
};

// Checks every (agent, type) cell; cells may run on `threads` workers and are
// merged in a fixed order.
MechanismVerdict CheckMechanism(const StrategySpace& space,
                                const SignallingMap& signalling,
                                const UtilityModel& utility, double epsilon,
                                Notion notion, unsigned threads = 1);

}  // namespace osplab

#endif  // OSPLAB_DOMINANCE_H_
