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

// Generators and brute-force oracles shared by the unit tests and the
// acceptance run. The oracles work from first principles on plays and do not
// reuse the checker's departure-point machinery.

#ifndef OSPLAB_TESTS_TEST_SUPPORT_H_
#define OSPLAB_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/core.h>

#include "osplab/common.h"
#include "osplab/direct_mechanisms.h"
#include "osplab/dominance.h"
#include "osplab/game_form.h"

namespace osplab::testing {

struct RandomGame {
  GameFormSpec spec;
  ValuationTable valuations;
};

// Perfect-recall tree with up to `agents` agents, optional chance nodes and
// information sets merging nodes that share the owner's own history.
class GameGenerator {
 public:
  GameGenerator(uint64_t seed, int agents, int max_depth, int outcomes)
      : rng_(seed), agents_(agents), max_depth_(max_depth), outcomes_(outcomes) {}

  RandomGame Next(int types_per_agent) {
    spec_ = GameFormSpec();
    spec_.num_agents = agents_;
    sets_.clear();
    std::vector<std::string> histories(agents_);
    Grow(0, histories);
    // Each agent must act somewhere, or it would have no information sets.
    // Keep exhaustive checks cheap.
    for (int a = 0; a < agents_; ++a) {
      bool acts = false;
      double strategies = 1.0;
      for (const InfoSet& set : spec_.info_sets) {
        if (set.agent != a) continue;
        acts = true;
        strategies *= static_cast<double>(spec_.nodes[set.nodes[0]].edges.size());
      }
      if (!acts || strategies > 256) return Next(types_per_agent);
    }
    std::vector<std::string> outcomes;
    for (int s = 0; s < outcomes_; ++s) outcomes.push_back(fmt::format("s{}", s));
    std::vector<ValuationTable::AgentValues> agents(agents_);
    for (auto& av : agents) {
      for (int t = 0; t < types_per_agent; ++t) {
        av.types.push_back(fmt::format("t{}", t));
        std::vector<double> row;
        for (int s = 0; s < outcomes_; ++s) row.push_back(static_cast<double>(rng_.Below(5)) / 4.0);
        av.values.push_back(row);
      }
    }
    RandomGame g;
    g.spec = spec_;
    g.valuations = ValuationTable(outcomes, agents, 0.0, 1.0);
    return g;
  }

  Rng& rng() { return rng_; }

 private:
  int Grow(int depth, std::vector<std::string> histories) {
    const int id = static_cast<int>(spec_.nodes.size());
    spec_.nodes.emplace_back();
    const uint64_t roll = rng_.Below(10);
    if (depth >= max_depth_ || (depth > 0 && roll < 2)) {
      spec_.nodes[id].kind = NodeKind::kTerminal;
      spec_.nodes[id].outcome = fmt::format("s{}", rng_.Below(outcomes_));
      return id;
    }
    if (roll == 9) {
      spec_.nodes[id].kind = NodeKind::kChance;
      const double p = 0.25 * static_cast<double>(1 + rng_.Below(3));
      for (int k = 0; k < 2; ++k) {
        const int child = Grow(depth + 1, histories);
        spec_.nodes[id].edges.push_back({fmt::format("c{}_{}", id, k), child, k == 0 ? p : 1.0 - p});
      }
      return id;
    }
    const int agent = static_cast<int>(rng_.Below(agents_));
    const int width = 2 + static_cast<int>(rng_.Below(2));
    spec_.nodes[id].kind = NodeKind::kPlayer;
    spec_.nodes[id].owner = agent;
    const auto key = std::make_tuple(agent, histories[agent], width);
    int set;
    auto it = sets_.find(key);
    if (it != sets_.end() && rng_.Below(2) == 0) {
      set = it->second;
      spec_.info_sets[set].nodes.push_back(id);
    } else {
      set = static_cast<int>(spec_.info_sets.size());
      spec_.info_sets.push_back({agent, {id}});
      sets_[key] = set;
    }
    for (int k = 0; k < width; ++k) {
      std::vector<std::string> next = histories;
      next[agent] += fmt::format("/{}:{}", set, k);
      const int child = Grow(depth + 1, next);
      spec_.nodes[id].edges.push_back({fmt::format("i{}a{}", set, k), child});
    }
    return id;
  }

  Rng rng_;
  int agents_, max_depth_, outcomes_;
  GameFormSpec spec_;
  std::map<std::tuple<int, std::string, int>, int> sets_;
};

// One play of the game traced directly through the spec.
struct Trace {
  NodeId terminal;
  std::vector<NodeId> nodes;
};

inline Trace TracePlay(const GameForm& game, const std::vector<const Strategy*>& by_agent,
                       const ChanceRealization& chance) {
  Trace t;
  NodeId id = game.root();
  while (game.node(id).kind != NodeKind::kTerminal) {
    t.nodes.push_back(id);
    const Node& node = game.node(id);
    if (node.kind == NodeKind::kChance) {
      id = node.edges[chance.choice[game.chance_ordinal(id)]].child;
      continue;
    }
    const int set = game.info_set_of(id);
    const std::string& label =
        game.actions(set)[by_agent[node.owner]->choice[game.local_index(set)]];
    for (const Edge& e : node.edges) {
      if (e.action == label) id = e.child;
    }
  }
  t.terminal = id;
  return t;
}

// Every opponent profile as pointers into the strategy space, including a
// placeholder slot for `agent`.
inline std::vector<std::vector<const Strategy*>> AllOpponents(const StrategySpace& space,
                                                               int agent) {
  std::vector<std::vector<const Strategy*>> out;
  const int n = space.game().num_agents();
  std::vector<int> idx(n, 0);
  while (true) {
    std::vector<const Strategy*> by(n, nullptr);
    for (int a = 0; a < n; ++a) {
      if (a != agent) by[a] = &space.strategies(a)[idx[a]];
    }
    out.push_back(by);
    int a = n - 1;
    for (; a >= 0; --a) {
      if (a == agent) continue;
      if (++idx[a] < static_cast<int>(space.strategies(a).size())) break;
      idx[a] = 0;
    }
    if (a < 0) break;
  }
  return out;
}

// Obvious dominance by definition: for each play pair that diverges at one
// of the agent's nodes, group by that node's information set; within a group
// the intended worst case must beat the deviation's best case minus epsilon.
// With `expectation`, values are chance-averaged per opponent profile,
// conditioned on the realizations that diverge at the set.
inline double OspGapOracle(const StrategySpace& space, int agent, int type,
                           const Strategy& intended, const UtilityModel& u,
                           bool expectation) {
  const GameForm& game = space.game();
  double worst = -INFINITY;
  auto opponents = AllOpponents(space, agent);
  for (const Strategy& dev : space.strategies(agent)) {
    if (dev == intended) continue;
    std::map<int, std::pair<double, double>> bounds;  // set -> (min lhs, max rhs)
    for (auto by : opponents) {
      std::map<int, std::tuple<double, double, double>> sums;  // mass, lhs, rhs
      for (const ChanceRealization& r : space.realizations()) {
        by[agent] = &intended;
        const Trace a = TracePlay(game, by, r);
        by[agent] = &dev;
        const Trace b = TracePlay(game, by, r);
        if (a.terminal == b.terminal) continue;
        size_t k = 0;
        while (k < a.nodes.size() && k < b.nodes.size() && a.nodes[k] == b.nodes[k]) ++k;
        const NodeId split = a.nodes[k - 1];
        if (game.node(split).kind != NodeKind::kPlayer || game.node(split).owner != agent) continue;
        const int set = game.info_set_of(split);
        const double ua = u(agent, type, a.terminal), ub = u(agent, type, b.terminal);
        if (expectation) {
          auto& [m, l, h] = sums[set];
          m += r.probability;
          l += r.probability * ua;
          h += r.probability * ub;
        } else {
          auto [it, fresh] = bounds.try_emplace(set, ua, ub);
          if (!fresh) {
            it->second.first = std::min(it->second.first, ua);
            it->second.second = std::max(it->second.second, ub);
          }
        }
      }
      for (const auto& [set, s] : sums) {
        const auto& [m, l, h] = s;
        auto [it, fresh] = bounds.try_emplace(set, l / m, h / m);
        if (!fresh) {
          it->second.first = std::min(it->second.first, l / m);
          it->second.second = std::max(it->second.second, h / m);
        }
      }
    }
    for (const auto& [set, b] : bounds) worst = std::max(worst, b.second - b.first);
  }
  return worst;
}

// Weak dominance gap per realization: max over deviations, opponents and
// chance of u(dev) - u(intended).
inline double SpGapOracle(const StrategySpace& space, int agent, int type,
                          const Strategy& intended, const UtilityModel& u) {
  double worst = -INFINITY;
  for (auto by : AllOpponents(space, agent)) {
    for (const ChanceRealization& r : space.realizations()) {
      by[agent] = &intended;
      const double base = u(agent, type, TracePlay(space.game(), by, r).terminal);
      for (const Strategy& dev : space.strategies(agent)) {
        if (dev == intended) continue;
        by[agent] = &dev;
        worst = std::max(worst, u(agent, type, TracePlay(space.game(), by, r).terminal) - base);
      }
    }
  }
  return worst;
}

// Random direct-revelation instance: domains of size 2..max_types, an
// explicit outcome table over 2..max_outcomes outcomes, values in [0, 1] on a
// grid of eighths.
struct DirectInstance {
  SocialChoice f;
  ValuationTable valuations;
};

inline DirectInstance RandomDirectInstance(Rng& rng, int n, int max_types, int max_outcomes) {
  const int outcomes = 2 + static_cast<int>(rng.Below(max_outcomes - 1));
  std::vector<std::string> labels;
  for (int s = 0; s < outcomes; ++s) labels.push_back(fmt::format("s{}", s));
  std::vector<ValuationTable::AgentValues> agents(n);
  std::vector<int> sizes;
  for (auto& a : agents) {
    const int types = 2 + static_cast<int>(rng.Below(max_types - 1));
    sizes.push_back(types);
    for (int t = 0; t < types; ++t) {
      a.types.push_back(fmt::format("t{}", t));
      std::vector<double> row;
      for (int s = 0; s < outcomes; ++s) row.push_back(static_cast<double>(rng.Below(9)) / 8.0);
      a.values.push_back(row);
    }
  }
  // Pin the bounds so that t_sup - t_inf = 1.
  agents[0].values[0][0] = 0.0;
  agents[0].values[0][1] = 1.0;
  const ProfileIndexer indexer(sizes);
  std::vector<int> table(indexer.Count());
  for (int& x : table) x = static_cast<int>(rng.Below(outcomes));
  DirectInstance inst;
  inst.f = [indexer, table](std::span<const int> b) { return table[indexer.Index(b)]; };
  inst.valuations = ValuationTable(labels, agents, 0.0, 1.0);
  return inst;
}

// Checks truthful obvious dominance of a direct mechanism through its game
// form; returns the largest gap over all cells.
inline double DirectOspGap(const DirectMechanism& mech) {
  const DirectGame g = AsGameForm(mech);
  const StrategySpace space(*g.game);
  const MechanismVerdict v = CheckMechanism(space, g.signalling, g.utility, 0.0, Notion::kOSP);
  double worst = -INFINITY;
  for (const CellVerdict& c : v.cells) worst = std::max(worst, c.verdict.gap);
  return worst;
}

}  // namespace osplab::testing

#endif  // OSPLAB_TESTS_TEST_SUPPORT_H_
