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

#include "osplab/game_form.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/core.h>

#include "osplab/common.h"

namespace osplab {
namespace {

constexpr double kNodeProbabilityTolerance = 1e-12;

std::string NodeName(const GameFormSpec& spec, NodeId id) {
  const std::string& label = spec.nodes[id].label;
  return label.empty() ? fmt::format("#{}", id) : fmt::format("'{}'", label);
}

int InferAgents(const GameFormSpec& spec) {
  if (spec.num_agents >= 0) return spec.num_agents;
  int agents = 0;
  for (const Node& n : spec.nodes) {
    if (n.kind == NodeKind::kPlayer) agents = std::max(agents, n.owner + 1);
  }
  for (const InfoSet& s : spec.info_sets) agents = std::max(agents, s.agent + 1);
  return agents;
}

}  // namespace

std::vector<std::string> Validate(const GameFormSpec& spec) {
  std::vector<std::string> out;
  const int n = static_cast<int>(spec.nodes.size());
  if (n == 0) {
    out.push_back("game has no histories");
    return out;
  }
  if (spec.root < 0 || spec.root >= n) {
    out.push_back(fmt::format("root {} is not a node", spec.root));
    return out;
  }
  const int agents = InferAgents(spec);

  std::vector<int> parents(n, 0);
  bool edges_ok = true;
  for (NodeId id = 0; id < n; ++id) {
    const Node& node = spec.nodes[id];
    const std::string name = NodeName(spec, id);
    std::set<std::string> labels;
    for (const Edge& e : node.edges) {
      if (e.child < 0 || e.child >= n) {
        out.push_back(fmt::format("node {}: edge '{}' points to missing node {}",
                                  name, e.action, e.child));
        edges_ok = false;
        continue;
      }
      ++parents[e.child];
      if (!labels.insert(e.action).second) {
        out.push_back(fmt::format("node {}: duplicate action label '{}'", name,
                                  e.action));
      }
    }
    switch (node.kind) {
      case NodeKind::kTerminal:
        if (!node.edges.empty()) {
          out.push_back(fmt::format("terminal node {} has outgoing edges", name));
        }
        if (node.outcome.empty()) {
          out.push_back(fmt::format("terminal node {} has no outcome", name));
        }
        break;
      case NodeKind::kPlayer:
        if (node.edges.empty()) {
          out.push_back(fmt::format("player node {} has no actions", name));
        }
        if (node.owner < 0 || node.owner >= agents) {
          out.push_back(
              fmt::format("player node {} has invalid owner {}", name, node.owner));
        }
        break;
      case NodeKind::kChance: {
        if (node.edges.empty()) {
          out.push_back(fmt::format("chance node {} has no actions", name));
        }
        double total = 0.0;
        for (const Edge& e : node.edges) {
          if (!(e.prob >= 0.0)) {
            out.push_back(fmt::format("chance node {}: action '{}' has negative "
                                      "probability",
                                      name, e.action));
          }
          total += e.prob;
        }
        if (std::abs(total - 1.0) > kNodeProbabilityTolerance) {
          out.push_back(fmt::format(
              "chance node {}: probabilities sum to {} instead of 1", name, total));
        }
        break;
      }
    }
  }

  if (parents[spec.root] != 0) {
    out.push_back("root has an incoming edge");
  }
  for (NodeId id = 0; id < n; ++id) {
    if (id != spec.root && parents[id] > 1) {
      out.push_back(fmt::format("node {} has {} parents", NodeName(spec, id),
                                parents[id]));
    }
  }
  if (edges_ok) {
    std::vector<bool> seen(n, false);
    std::vector<NodeId> stack{spec.root};
    seen[spec.root] = true;
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      for (const Edge& e : spec.nodes[id].edges) {
        if (!seen[e.child]) {
          seen[e.child] = true;
          stack.push_back(e.child);
        }
      }
    }
    for (NodeId id = 0; id < n; ++id) {
      if (!seen[id]) {
        out.push_back(
            fmt::format("node {} is unreachable from the root", NodeName(spec, id)));
      }
    }
  }

  // Information sets partition player nodes by agent.
  std::vector<int> member_of(n, -1);
  std::map<int, std::map<std::string, int>> label_owner;  // agent -> label -> set
  for (int s = 0; s < static_cast<int>(spec.info_sets.size()); ++s) {
    const InfoSet& set = spec.info_sets[s];
    if (set.nodes.empty()) {
      out.push_back(fmt::format("information set {} is empty", s));
      continue;
    }
    std::set<std::string> reference;
    bool have_reference = false;
    for (NodeId id : set.nodes) {
      if (id < 0 || id >= n) {
        out.push_back(
            fmt::format("information set {} lists missing node {}", s, id));
        continue;
      }
      const Node& node = spec.nodes[id];
      if (node.kind != NodeKind::kPlayer || node.owner != set.agent) {
        out.push_back(fmt::format(
            "information set {} of agent {} contains node {} where that agent "
            "does not act",
            s, set.agent, NodeName(spec, id)));
        continue;
      }
      if (member_of[id] >= 0) {
        out.push_back(fmt::format("node {} belongs to information sets {} and {}",
                                  NodeName(spec, id), member_of[id], s));
        continue;
      }
      member_of[id] = s;
      std::set<std::string> labels;
      for (const Edge& e : node.edges) labels.insert(e.action);
      if (!have_reference) {
        reference = labels;
        have_reference = true;
      } else if (labels != reference) {
        out.push_back(fmt::format(
            "information set {}: node {} offers a different action set", s,
            NodeName(spec, id)));
      }
    }
    for (const std::string& label : reference) {
      auto [it, inserted] = label_owner[set.agent].emplace(label, s);
      if (!inserted && it->second != s) {
        out.push_back(fmt::format(
            "agent {}: action '{}' available at two information sets ({} and {})",
            set.agent, label, it->second, s));
      }
    }
  }
  for (NodeId id = 0; id < n; ++id) {
    if (spec.nodes[id].kind == NodeKind::kPlayer && member_of[id] < 0) {
      out.push_back(fmt::format("player node {} is in no information set",
                                NodeName(spec, id)));
    }
  }
  return out;
}

GameForm::GameForm(GameFormSpec spec) : spec_(std::move(spec)) {
  std::vector<std::string> problems = Validate(spec_);
  if (!problems.empty()) {
    std::string joined = "invalid game form:";
    for (const auto& p : problems) joined += "\n  " + p;
    throw Error(joined);
  }
  const int n = static_cast<int>(spec_.nodes.size());
  num_agents_ = InferAgents(spec_);
  agent_info_sets_.assign(num_agents_, {});
  local_index_.assign(spec_.info_sets.size(), 0);
  actions_.assign(spec_.info_sets.size(), {});
  node_info_set_.assign(n, -1);
  chance_ordinal_.assign(n, -1);
  action_edge_.assign(n, {});

  for (int s = 0; s < static_cast<int>(spec_.info_sets.size()); ++s) {
    const InfoSet& set = spec_.info_sets[s];
    local_index_[s] = static_cast<int>(agent_info_sets_[set.agent].size());
    agent_info_sets_[set.agent].push_back(s);
    for (const Edge& e : spec_.nodes[set.nodes.front()].edges) {
      actions_[s].push_back(e.action);
    }
    for (NodeId id : set.nodes) {
      node_info_set_[id] = s;
      const auto& edges = spec_.nodes[id].edges;
      for (const std::string& label : actions_[s]) {
        auto it = std::find_if(edges.begin(), edges.end(),
                               [&](const Edge& e) { return e.action == label; });
        action_edge_[id].push_back(static_cast<int>(it - edges.begin()));
      }
    }
  }

  // Chance nodes are numbered in depth-first preorder from the root.
  std::vector<std::pair<NodeId, int>> stack{{spec_.root, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    depth_ = std::max(depth_, d);
    const Node& node = spec_.nodes[id];
    if (node.kind == NodeKind::kChance) {
      chance_ordinal_[id] = static_cast<int>(chance_nodes_.size());
      chance_nodes_.push_back(id);
    }
    for (auto it = node.edges.rbegin(); it != node.edges.rend(); ++it) {
      stack.emplace_back(it->child, d + 1);
    }
  }
}

Strategy StrategyFromLabels(const GameForm& game, int agent,
                            std::span<const std::string> labels) {
  if (agent < 0 || agent >= game.num_agents()) {
    throw Error(fmt::format("unknown agent {}", agent));
  }
  const auto& sets = game.agent_info_sets(agent);
  Strategy s{agent, std::vector<int>(sets.size(), -1)};
  for (const std::string& label : labels) {
    bool found = false;
    for (size_t k = 0; k < sets.size() && !found; ++k) {
      const auto& acts = game.actions(sets[k]);
      auto it = std::find(acts.begin(), acts.end(), label);
      if (it != acts.end()) {
        if (s.choice[k] >= 0) {
          throw Error(fmt::format(
              "agent {}: two actions given for information set {}", agent,
              sets[k]));
        }
        s.choice[k] = static_cast<int>(it - acts.begin());
        found = true;
      }
    }
    if (!found) {
      throw Error(fmt::format("agent {} has no action '{}'", agent, label));
    }
  }
  for (size_t k = 0; k < sets.size(); ++k) {
    if (s.choice[k] < 0) {
      throw Error(fmt::format("agent {}: no action given for information set {}",
                              agent, sets[k]));
    }
  }
  return s;
}

std::vector<std::string> StrategyLabels(const GameForm& game,
                                        const Strategy& strategy) {
  std::vector<std::string> labels;
  const auto& sets = game.agent_info_sets(strategy.agent);
  for (size_t k = 0; k < sets.size(); ++k) {
    labels.push_back(game.actions(sets[k])[strategy.choice[k]]);
  }
  return labels;
}

NodeId Walk(const GameForm& game, std::span<const int> chance_choice,
            std::span<const Strategy* const> by_agent, std::vector<NodeId>* path) {
  NodeId id = game.root();
  while (true) {
    if (path) path->push_back(id);
    const Node& node = game.node(id);
    switch (node.kind) {
      case NodeKind::kTerminal:
        return id;
      case NodeKind::kChance:
        id = node.edges[chance_choice[game.chance_ordinal(id)]].child;
        break;
      case NodeKind::kPlayer: {
        const Strategy* s =
            node.owner < static_cast<int>(by_agent.size()) ? by_agent[node.owner]
                                                           : nullptr;
        if (s == nullptr) {
          throw Error(fmt::format("unassigned agent {} acts at node '{}'",
                                  node.owner, node.label));
        }
        const int set = game.info_set_of(id);
        const int k = s->choice[game.local_index(set)];
        id = node.edges[game.edge_for_action(id, k)].child;
        break;
      }
    }
  }
}

PlayResult Play(const GameForm& game, const ChanceRealization& chance,
                std::span<const Strategy> profile) {
  if (chance.choice.size() != game.chance_nodes().size()) {
    throw Error("chance realization does not cover every chance node");
  }
  std::vector<const Strategy*> by_agent(game.num_agents(), nullptr);
  for (const Strategy& s : profile) {
    if (s.agent < 0 || s.agent >= game.num_agents()) {
      throw Error(fmt::format("strategy for unknown agent {}", s.agent));
    }
    if (s.choice.size() != game.agent_info_sets(s.agent).size()) {
      throw Error(fmt::format("strategy of agent {} has the wrong size", s.agent));
    }
    by_agent[s.agent] = &s;
  }
  PlayResult result;
  result.terminal = Walk(game, chance.choice, by_agent, &result.path);
  result.outcome = game.node(result.terminal).outcome;
  return result;
}

std::vector<Strategy> EnumerateStrategies(const GameForm& game, int agent,
                                          uint64_t cap) {
  const auto& sets = game.agent_info_sets(agent);
  std::vector<int> sizes;
  for (int s : sets) sizes.push_back(static_cast<int>(game.actions(s).size()));
  ProfileIndexer indexer(sizes);
  uint64_t count = 0;
  try {
    count = indexer.Count(cap);
  } catch (const Error&) {
    throw Error(fmt::format("strategy space too large for agent {} (cap {})",
                            agent, cap));
  }
  std::vector<Strategy> out;
  out.reserve(count);
  std::vector<int> choice(sets.size(), 0);
  do {
    out.push_back(Strategy{agent, choice});
  } while (indexer.Next(choice));
  return out;
}

std::vector<ChanceRealization> EnumerateRealizations(const GameForm& game,
                                                     uint64_t cap) {
  std::vector<int> sizes;
  for (NodeId id : game.chance_nodes()) {
    sizes.push_back(static_cast<int>(game.node(id).edges.size()));
  }
  ProfileIndexer indexer(sizes);
  uint64_t count = 0;
  try {
    count = indexer.Count(cap);
  } catch (const Error&) {
    throw Error(fmt::format("chance realization space exceeds the cap of {}", cap));
  }
  std::vector<ChanceRealization> out;
  out.reserve(count);
  std::vector<int> choice(sizes.size(), 0);
  do {
    double p = 1.0;
    for (size_t k = 0; k < choice.size(); ++k) {
      p *= game.node(game.chance_nodes()[k]).edges[choice[k]].prob;
    }
    out.push_back(ChanceRealization{choice, p});
  } while (indexer.Next(choice));
  return out;
}

StrategySpace::StrategySpace(const GameForm& game, uint64_t cap) : game_(&game) {
  for (int a = 0; a < game.num_agents(); ++a) {
    strategies_.push_back(EnumerateStrategies(game, a, cap));
  }
  realizations_ = EnumerateRealizations(game, cap);
}

uint64_t StrategySpace::OpponentCount(int agent) const {
  uint64_t total = 1;
  for (int a = 0; a < game_->num_agents(); ++a) {
    if (a != agent) total *= strategies_[a].size();
  }
  return total;
}

void StrategySpace::DecodeOpponents(int agent, uint64_t index,
                                    std::vector<const Strategy*>& by_agent) const {
  for (int a = game_->num_agents() - 1; a >= 0; --a) {
    if (a == agent) continue;
    const uint64_t size = strategies_[a].size();
    by_agent[a] = &strategies_[a][index % size];
    index /= size;
  }
}

std::vector<Strategy> StrategySpace::OpponentProfile(int agent,
                                                     uint64_t index) const {
  std::vector<const Strategy*> by_agent(game_->num_agents(), nullptr);
  DecodeOpponents(agent, index, by_agent);
  std::vector<Strategy> out;
  for (int a = 0; a < game_->num_agents(); ++a) {
    if (a != agent) out.push_back(*by_agent[a]);
  }
  return out;
}

std::vector<DeparturePoint> DeparturePoints(const GameForm& game,
                                            const Strategy& a,
                                            const Strategy& b) {
  if (a.agent != b.agent) {
    throw Error("departure points need two strategies of the same agent");
  }
  const int agent = a.agent;
  const auto& sets = game.agent_info_sets(agent);
  std::vector<int> differing;
  for (size_t k = 0; k < sets.size(); ++k) {
    if (a.choice[k] != b.choice[k]) differing.push_back(static_cast<int>(k));
  }
  if (differing.empty()) return {};

  StrategySpace space(game);
  const auto& realizations = space.realizations();
  std::vector<DeparturePoint> points(differing.size());
  std::vector<int> last_projected(differing.size(), -1);
  for (size_t d = 0; d < differing.size(); ++d) {
    points[d].info_set = sets[differing[d]];
  }

  std::vector<const Strategy*> by_agent(game.num_agents(), nullptr);
  std::vector<NodeId> path_a, path_b;
  std::vector<char> reached_a(sets.size()), reached_b(sets.size());
  const uint64_t opponents = space.OpponentCount(agent);
  for (uint64_t o = 0; o < opponents; ++o) {
    space.DecodeOpponents(agent, o, by_agent);
    for (size_t r = 0; r < realizations.size(); ++r) {
      path_a.clear();
      path_b.clear();
      by_agent[agent] = &a;
      Walk(game, realizations[r].choice, by_agent, &path_a);
      by_agent[agent] = &b;
      Walk(game, realizations[r].choice, by_agent, &path_b);
      std::fill(reached_a.begin(), reached_a.end(), 0);
      std::fill(reached_b.begin(), reached_b.end(), 0);
      for (NodeId id : path_a) {
        const int s = game.info_set_of(id);
        if (s >= 0 && game.info_set(s).agent == agent) reached_a[game.local_index(s)] = 1;
      }
      for (NodeId id : path_b) {
        const int s = game.info_set_of(id);
        if (s >= 0 && game.info_set(s).agent == agent) reached_b[game.local_index(s)] = 1;
      }
      for (size_t d = 0; d < differing.size(); ++d) {
        const int k = differing[d];
        if (!reached_a[k] || !reached_b[k]) continue;
        Witness w{space.OpponentProfile(agent, o), realizations[r]};
        if (last_projected[d] != static_cast<int>(o)) {
          points[d].projected.push_back(w.opponents);
          last_projected[d] = static_cast<int>(o);
        }
        points[d].witnesses.push_back(std::move(w));
      }
    }
  }
  std::erase_if(points, [](const DeparturePoint& p) { return p.witnesses.empty(); });
  return points;
}

ValuationTable::ValuationTable(std::vector<std::string> outcomes,
                               std::vector<AgentValues> agents, double t_inf,
                               double t_sup)
    : outcomes_(std::move(outcomes)),
      agents_(std::move(agents)),
      t_inf_(t_inf),
      t_sup_(t_sup) {
  if (!(t_inf_ < t_sup_)) {
    throw Error(fmt::format("valuation bounds need t_inf < t_sup (got {} and {})",
                            t_inf_, t_sup_));
  }
  constexpr double kSlack = 1e-12;
  for (size_t a = 0; a < agents_.size(); ++a) {
    const AgentValues& av = agents_[a];
    if (av.types.empty()) throw Error(fmt::format("agent {} has an empty domain", a));
    if (av.values.size() != av.types.size()) {
      throw Error(fmt::format("agent {}: {} types but {} value rows", a,
                              av.types.size(), av.values.size()));
    }
    for (size_t t = 0; t < av.values.size(); ++t) {
      if (av.values[t].size() != outcomes_.size()) {
        throw Error(fmt::format("agent {} type '{}': expected {} values, got {}", a,
                                av.types[t], outcomes_.size(),
                                av.values[t].size()));
      }
      for (size_t s = 0; s < outcomes_.size(); ++s) {
        const double v = av.values[t][s];
        if (!(v >= t_inf_ - kSlack && v <= t_sup_ + kSlack)) {
          throw Error(fmt::format(
              "agent {} type '{}' outcome '{}': value {} outside [{}, {}]", a,
              av.types[t], outcomes_[s], v, t_inf_, t_sup_));
        }
      }
    }
  }
}

std::vector<int> ValuationTable::domain_sizes() const {
  std::vector<int> sizes;
  for (const auto& a : agents_) sizes.push_back(static_cast<int>(a.types.size()));
  return sizes;
}

double ValuationTable::value(int agent, int type, const std::string& outcome) const {
  const int s = OutcomeIndex(outcome);
  if (s < 0) throw Error(fmt::format("unknown outcome '{}'", outcome));
  return value(agent, type, s);
}

int ValuationTable::OutcomeIndex(const std::string& label) const {
  auto it = std::find(outcomes_.begin(), outcomes_.end(), label);
  return it == outcomes_.end() ? -1 : static_cast<int>(it - outcomes_.begin());
}

int ValuationTable::TypeIndex(int agent, const std::string& label) const {
  const auto& types = agents_[agent].types;
  auto it = std::find(types.begin(), types.end(), label);
  return it == types.end() ? -1 : static_cast<int>(it - types.begin());
}

}  // namespace osplab
