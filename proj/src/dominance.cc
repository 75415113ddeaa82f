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

#include "osplab/dominance.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "osplab/common.h"

namespace osplab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Outcome of the intended strategy against every (opponents, realization)
// pair, computed once per check and shared by all deviations.
struct IntendedPlays {
  std::vector<double> utility;          // [o * R + r]
  std::vector<uint8_t> reached;         // [(o * R + r) * K + k]
};

class Checker {
 public:
  Checker(const StrategySpace& space, int agent, int type,
          const Strategy& intended, const UtilityModel& utility)
      : space_(space),
        game_(space.game()),
        agent_(agent),
        type_(type),
        intended_(intended),
        utility_(utility),
        opponents_(space.OpponentCount(agent)),
        realizations_(space.realizations().size()),
        sets_(game_.agent_info_sets(agent).size()),
        by_agent_(game_.num_agents(), nullptr) {
    if (intended.agent != agent) {
      throw Error("intended strategy belongs to a different agent");
    }
    plays_.utility.resize(opponents_ * realizations_);
    plays_.reached.resize(opponents_ * realizations_ * sets_);
    for (uint64_t o = 0; o < opponents_; ++o) {
      space_.DecodeOpponents(agent_, o, by_agent_);
      for (size_t r = 0; r < realizations_; ++r) {
        const size_t cell = o * realizations_ + r;
        plays_.utility[cell] =
            Evaluate(intended_, r, &plays_.reached[cell * sets_]);
      }
    }
  }

  // Plays `s` against the currently decoded opponents and realization r.
  double Evaluate(const Strategy& s, size_t r, uint8_t* reached) {
    path_.clear();
    by_agent_[agent_] = &s;
    const NodeId z = Walk(game_, space_.realizations()[r].choice, by_agent_,
                          reached ? &path_ : nullptr);
    if (reached) {
      std::fill(reached, reached + sets_, 0);
      for (NodeId id : path_) {
        const int set = game_.info_set_of(id);
        if (set >= 0 && game_.info_set(set).agent == agent_) {
          reached[game_.local_index(set)] = 1;
        }
      }
    }
    return utility_(agent_, type_, z);
  }

  void Decode(uint64_t o) { space_.DecodeOpponents(agent_, o, by_agent_); }

  Witness MakeWitness(uint64_t o, std::optional<size_t> r, double mass = 1.0) const {
    Witness w;
    w.opponents = space_.OpponentProfile(agent_, o);
    if (r) {
      w.chance = space_.realizations()[*r];
    } else {
      w.chance.probability = mass;
    }
    return w;
  }

  const StrategySpace& space_;
  const GameForm& game_;
  int agent_;
  int type_;
  const Strategy& intended_;
  const UtilityModel& utility_;
  uint64_t opponents_;
  size_t realizations_;
  size_t sets_;
  std::vector<const Strategy*> by_agent_;
  std::vector<NodeId> path_;
  IntendedPlays plays_;
};

DominanceVerdict Finish(double gap, std::optional<Counterexample> worst,
                        double epsilon) {
  DominanceVerdict v;
  v.gap = gap;
  v.holds = gap <= epsilon + kComparisonSlack;
  if (!v.holds) v.counterexample = std::move(worst);
  return v;
}

void CheckEpsilon(double epsilon) {
  if (!(epsilon >= 0.0)) throw Error("epsilon must be non-negative");
}

}  // namespace

UtilityModel UtilityFromValuations(const GameForm& game,
                                   const ValuationTable& valuations) {
  std::vector<int> outcome_of(game.num_nodes(), -1);
  for (NodeId id = 0; id < static_cast<NodeId>(game.num_nodes()); ++id) {
    const Node& node = game.node(id);
    if (node.kind != NodeKind::kTerminal) continue;
    outcome_of[id] = valuations.OutcomeIndex(node.outcome);
    if (outcome_of[id] < 0) {
      throw Error(fmt::format("valuations do not cover outcome '{}'", node.outcome));
    }
  }
  return [outcome_of = std::move(outcome_of), valuations](int agent, int type, NodeId z) {
    return valuations.value(agent, type, outcome_of[z]);
  };
}

std::string NotionName(Notion notion) {
  switch (notion) {
    case Notion::kSP: return "sp";
    case Notion::kOSP: return "osp";
    case Notion::kSPExpectation: return "sp-exp";
    case Notion::kOSPExpectation: return "osp-exp";
  }
  return "?";
}

Notion ParseNotion(const std::string& text) {
  if (text == "sp") return Notion::kSP;
  if (text == "osp") return Notion::kOSP;
  if (text == "sp-exp") return Notion::kSPExpectation;
  if (text == "osp-exp") return Notion::kOSPExpectation;
  throw Error(fmt::format("unknown notion '{}' (expected sp|osp|sp-exp|osp-exp)",
                          text));
}

DominanceVerdict IsWeaklyDominant(const StrategySpace& space, int agent, int type,
                                  const Strategy& intended,
                                  const UtilityModel& utility, double epsilon,
                                  DominanceMode mode) {
  CheckEpsilon(epsilon);
  Checker ck(space, agent, type, intended, utility);
  const auto& realizations = space.realizations();
  double gap = -kInf;
  std::optional<Counterexample> worst;

  for (const Strategy& deviation : space.strategies(agent)) {
    if (deviation == intended) continue;
    for (uint64_t o = 0; o < ck.opponents_; ++o) {
      ck.Decode(o);
      if (mode == DominanceMode::kPerRealization) {
        for (size_t r = 0; r < ck.realizations_; ++r) {
          const double lhs = ck.plays_.utility[o * ck.realizations_ + r];
          const double rhs = ck.Evaluate(deviation, r, nullptr);
          if (rhs - lhs > gap) {
            gap = rhs - lhs;
            worst = Counterexample{deviation, -1, ck.MakeWitness(o, r),
                                   ck.MakeWitness(o, r), lhs, rhs};
          }
        }
      } else {
        double lhs = 0.0, rhs = 0.0;
        for (size_t r = 0; r < ck.realizations_; ++r) {
          const double p = realizations[r].probability;
          lhs += p * ck.plays_.utility[o * ck.realizations_ + r];
          rhs += p * ck.Evaluate(deviation, r, nullptr);
        }
        if (rhs - lhs > gap) {
          gap = rhs - lhs;
          worst = Counterexample{deviation, -1, ck.MakeWitness(o, std::nullopt),
                                 ck.MakeWitness(o, std::nullopt), lhs, rhs};
        }
      }
    }
  }
  return Finish(gap, std::move(worst), epsilon);
}

DominanceVerdict IsObviouslyDominant(const StrategySpace& space, int agent,
                                     int type, const Strategy& intended,
                                     const UtilityModel& utility, double epsilon) {
  CheckEpsilon(epsilon);
  Checker ck(space, agent, type, intended, utility);
  const size_t K = ck.sets_;
  double gap = -kInf;
  std::optional<Counterexample> worst;

  std::vector<uint8_t> reached(K);
  struct Extremum {
    double value;
    uint64_t o = 0;
    size_t r = 0;
  };
  std::vector<Extremum> lo(K), hi(K);

  for (const Strategy& deviation : space.strategies(agent)) {
    if (deviation == intended) continue;
    std::vector<int> differing;
    for (size_t k = 0; k < K; ++k) {
      if (deviation.choice[k] != intended.choice[k]) differing.push_back(k);
    }
    for (int k : differing) {
      lo[k] = {kInf};
      hi[k] = {-kInf};
    }
    for (uint64_t o = 0; o < ck.opponents_; ++o) {
      ck.Decode(o);
      for (size_t r = 0; r < ck.realizations_; ++r) {
        const size_t cell = o * ck.realizations_ + r;
        const uint8_t* base = &ck.plays_.reached[cell * K];
        bool any = false;
        for (int k : differing) any = any || base[k];
        if (!any) continue;
        const double rhs = ck.Evaluate(deviation, r, reached.data());
        const double lhs = ck.plays_.utility[cell];
        for (int k : differing) {
          if (!base[k] || !reached[k]) continue;
          if (lhs < lo[k].value) lo[k] = {lhs, o, r};
          if (rhs > hi[k].value) hi[k] = {rhs, o, r};
        }
      }
    }
    for (int k : differing) {
      if (lo[k].value == kInf) continue;  // not a departure point
      const double g = hi[k].value - lo[k].value;
      if (g > gap) {
        gap = g;
        worst = Counterexample{deviation,
                               ck.game_.agent_info_sets(agent)[k],
                               ck.MakeWitness(lo[k].o, lo[k].r),
                               ck.MakeWitness(hi[k].o, hi[k].r),
                               lo[k].value,
                               hi[k].value};
      }
    }
  }
  return Finish(gap, std::move(worst), epsilon);
}

DominanceVerdict IsObviouslyDominantInExpectation(const StrategySpace& space,
                                                  int agent, int type,
                                                  const Strategy& intended,
                                                  const UtilityModel& utility,
                                                  double epsilon) {
  CheckEpsilon(epsilon);
  Checker ck(space, agent, type, intended, utility);
  const auto& realizations = space.realizations();
  const size_t K = ck.sets_;
  double gap = -kInf;
  std::optional<Counterexample> worst;

  std::vector<uint8_t> reached(K);
  struct Extremum {
    double value;
    uint64_t o = 0;
    double mass = 0.0;
  };
  std::vector<Extremum> lo(K), hi(K);
  std::vector<double> mass(K), sum_lhs(K), sum_rhs(K);
  std::vector<int> witnesses(K);

  for (const Strategy& deviation : space.strategies(agent)) {
    if (deviation == intended) continue;
    std::vector<int> differing;
    for (size_t k = 0; k < K; ++k) {
      if (deviation.choice[k] != intended.choice[k]) differing.push_back(k);
    }
    for (int k : differing) {
      lo[k] = {kInf};
      hi[k] = {-kInf};
    }
    for (uint64_t o = 0; o < ck.opponents_; ++o) {
      ck.Decode(o);
      for (int k : differing) {
        mass[k] = sum_lhs[k] = sum_rhs[k] = 0.0;
        witnesses[k] = 0;
      }
      for (size_t r = 0; r < ck.realizations_; ++r) {
        const size_t cell = o * ck.realizations_ + r;
        const uint8_t* base = &ck.plays_.reached[cell * K];
        bool any = false;
        for (int k : differing) any = any || base[k];
        if (!any) continue;
        const double rhs = ck.Evaluate(deviation, r, reached.data());
        const double lhs = ck.plays_.utility[cell];
        const double p = realizations[r].probability;
        for (int k : differing) {
          if (!base[k] || !reached[k]) continue;
          ++witnesses[k];
          mass[k] += p;
          sum_lhs[k] += p * lhs;
          sum_rhs[k] += p * rhs;
        }
      }
      for (int k : differing) {
        if (witnesses[k] == 0) continue;
        if (!(mass[k] > 0.0)) {
          throw Error(fmt::format(
              "unreachable information set {}: opponent profile {} witnesses it "
              "only with probability zero",
              ck.game_.agent_info_sets(agent)[k], o));
        }
        const double lhs = sum_lhs[k] / mass[k];
        const double rhs = sum_rhs[k] / mass[k];
        if (lhs < lo[k].value) lo[k] = {lhs, o, mass[k]};
        if (rhs > hi[k].value) hi[k] = {rhs, o, mass[k]};
      }
    }
    for (int k : differing) {
      if (lo[k].value == kInf) continue;
      const double g = hi[k].value - lo[k].value;
      if (g > gap) {
        gap = g;
        worst = Counterexample{deviation,
                               ck.game_.agent_info_sets(agent)[k],
                               ck.MakeWitness(lo[k].o, std::nullopt, lo[k].mass),
                               ck.MakeWitness(hi[k].o, std::nullopt, hi[k].mass),
                               lo[k].value,
                               hi[k].value};
      }
    }
  }
  return Finish(gap, std::move(worst), epsilon);
}

MechanismVerdict CheckMechanism(const StrategySpace& space,
                                const SignallingMap& signalling,
                                const UtilityModel& utility, double epsilon,
                                Notion notion, unsigned threads) {
  const GameForm& game = space.game();
  if (static_cast<int>(signalling.strategies.size()) != game.num_agents()) {
    throw Error(fmt::format("signalling covers {} agents, game has {}",
                            signalling.strategies.size(), game.num_agents()));
  }
  MechanismVerdict result;
  result.notion = notion;
  result.epsilon = epsilon;
  for (int a = 0; a < game.num_agents(); ++a) {
    for (int t = 0; t < static_cast<int>(signalling.strategies[a].size()); ++t) {
      result.cells.push_back(CellVerdict{a, t, {}});
    }
  }
  std::vector<char> sp_ok(result.cells.size(), 1);
  ParallelFor(result.cells.size(), threads, [&](size_t i) {
    CellVerdict& cell = result.cells[i];
    const Strategy& s = signalling.at(cell.agent, cell.type);
    switch (notion) {
      case Notion::kSP:
        cell.verdict = IsWeaklyDominant(space, cell.agent, cell.type, s, utility,
                                        epsilon, DominanceMode::kPerRealization);
        break;
      case Notion::kSPExpectation:
        cell.verdict = IsWeaklyDominant(space, cell.agent, cell.type, s, utility,
                                        epsilon, DominanceMode::kExpectation);
        break;
      case Notion::kOSP:
        cell.verdict =
            IsObviouslyDominant(space, cell.agent, cell.type, s, utility, epsilon);
        if (cell.verdict.holds) {
          sp_ok[i] = IsWeaklyDominant(space, cell.agent, cell.type, s, utility,
                                      epsilon, DominanceMode::kPerRealization)
                         .holds;
        }
        break;
      case Notion::kOSPExpectation:
        cell.verdict = IsObviouslyDominantInExpectation(space, cell.agent,
                                                        cell.type, s, utility,
                                                        epsilon);
        if (cell.verdict.holds) {
          sp_ok[i] = IsWeaklyDominant(space, cell.agent, cell.type, s, utility,
                                      epsilon, DominanceMode::kExpectation)
                         .holds;
        }
        break;
    }
  });
  for (size_t i = 0; i < result.cells.size(); ++i) {
    result.holds = result.holds && result.cells[i].verdict.holds;
    result.implies_sp = result.implies_sp && sp_ok[i];
  }
  return result;
}

}  // namespace osplab
