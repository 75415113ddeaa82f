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

// Finite extensive game forms with chance moves and information sets.
//
// A game form is a rooted tree of histories. Internal histories belong either
// to an agent or to chance; terminal histories carry an outcome label. Each
// agent's decision histories are partitioned into information sets whose
// members share one action-label set, and no label is offered at two
// information sets of the same agent. Strategies pick one action per
// information set; chance realizations pick one action per chance history.

#ifndef OSPLAB_GAME_FORM_H_
#define OSPLAB_GAME_FORM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace osplab {

using NodeId = int;

// Sentinel for the dummy history at which no agent acts. It lies outside the
// tree, never participates in reachability and carries no outcome.
inline constexpr NodeId kDummyHistory = -1;

// Owner value of chance histories.
inline constexpr int kChanceOwner = -1;

inline constexpr uint64_t kDefaultEnumerationCap = 1'000'000;

enum class NodeKind { kPlayer, kChance, kTerminal };

struct Edge {
  std::string action;
  NodeId child = 0;
  double prob = 0.0;  // chance edges only
};

struct Node {
  std::string label;
  NodeKind kind = NodeKind::kTerminal;
  int owner = kChanceOwner;
  std::vector<Edge> edges;
  std::string outcome;  // terminal nodes only
};

struct InfoSet {
  int agent = 0;
  std::vector<NodeId> nodes;
};

// Unvalidated description of a game form, as read from a file or assembled by
// a builder. Node ids are indices into `nodes`.
struct GameFormSpec {
  std::vector<Node> nodes;
  std::vector<InfoSet> info_sets;
  NodeId root = 0;
  // Number of agents; -1 infers 1 + the largest owner index.
  int num_agents = -1;
};

// Returns one message per violated structural condition; empty iff the spec
// is a well-formed game form.
std::vector<std::string> Validate(const GameFormSpec& spec);

// A validated, immutable game form with precomputed lookup tables.
class GameForm {
 public:
  // Throws Error listing every diagnostic if the spec does not validate.
  explicit GameForm(GameFormSpec spec);

  const GameFormSpec& spec() const { return spec_; }
  const Node& node(NodeId id) const { return spec_.nodes[id]; }
  size_t num_nodes() const { return spec_.nodes.size(); }
  NodeId root() const { return spec_.root; }
  int num_agents() const { return num_agents_; }
  int depth() const { return depth_; }

  // Global information-set ids of `agent`, in declaration order.
  const std::vector<int>& agent_info_sets(int agent) const {
    return agent_info_sets_[agent];
  }
  const InfoSet& info_set(int id) const { return spec_.info_sets[id]; }
  // Position of an information set within its agent's list.
  int local_index(int info_set) const { return local_index_[info_set]; }
  // Canonical action labels of an information set.
  const std::vector<std::string>& actions(int info_set) const {
    return actions_[info_set];
  }
  // Information set containing a player node, -1 for other nodes.
  int info_set_of(NodeId id) const { return node_info_set_[id]; }

  const std::vector<NodeId>& chance_nodes() const { return chance_nodes_; }
  int chance_ordinal(NodeId id) const { return chance_ordinal_[id]; }

  // Edge index at `id` taken by the k-th canonical action of its info set.
  int edge_for_action(NodeId id, int k) const { return action_edge_[id][k]; }

  bool has_chance() const { return !chance_nodes_.empty(); }

 private:
  GameFormSpec spec_;
  int num_agents_ = 0;
  int depth_ = 0;
  std::vector<std::vector<int>> agent_info_sets_;
  std::vector<int> local_index_;
  std::vector<std::vector<std::string>> actions_;
  std::vector<int> node_info_set_;
  std::vector<NodeId> chance_nodes_;
  std::vector<int> chance_ordinal_;
  std::vector<std::vector<int>> action_edge_;
};

// choice[k] is the index, into game.actions(info set), of the action taken at
// the agent's k-th information set.
struct Strategy {
  int agent = 0;
  std::vector<int> choice;

  bool operator==(const Strategy&) const = default;
};

// choice[k] is the edge index taken at the k-th chance node.
struct ChanceRealization {
  std::vector<int> choice;
  double probability = 1.0;
};

struct PlayResult {
  NodeId terminal = 0;
  std::string outcome;
  std::vector<NodeId> path;  // root first, terminal last
};

// Builds a strategy from one action label per information set of the agent.
// Labels may be given in any order; each must name an action of a distinct
// information set and every information set must be covered.
Strategy StrategyFromLabels(const GameForm& game, int agent,
                            std::span<const std::string> labels);
// The chosen label at each of the agent's information sets.
std::vector<std::string> StrategyLabels(const GameForm& game,
                                        const Strategy& strategy);

// Follows chance choices at chance nodes and the owner's strategy at player
// nodes. `profile` must contain one strategy for every agent who acts on the
// realized path; otherwise throws Error("unassigned agent ...").
PlayResult Play(const GameForm& game, const ChanceRealization& chance,
                std::span<const Strategy> profile);

// Allocation-free walk used by the checkers. by_agent[a] may be null for
// agents that never act on the path. Appends visited nodes to `path` when it
// is non-null.
NodeId Walk(const GameForm& game, std::span<const int> chance_choice,
            std::span<const Strategy* const> by_agent,
            std::vector<NodeId>* path = nullptr);

// All strategies of `agent`: information sets in declaration order, actions
// in canonical order, last information set varying fastest. Throws
// Error("strategy space too large") above `cap`.
std::vector<Strategy> EnumerateStrategies(
    const GameForm& game, int agent, uint64_t cap = kDefaultEnumerationCap);

// Every full mapping of chance nodes to actions, with its probability.
std::vector<ChanceRealization> EnumerateRealizations(
    const GameForm& game, uint64_t cap = kDefaultEnumerationCap);

// Strategies of every agent plus chance realizations, enumerated once.
// Opponent profiles of an agent are addressed by a mixed-radix index over the
// other agents' strategy lists (higher agent index varying fastest).
class StrategySpace {
 public:
  explicit StrategySpace(const GameForm& game,
                         uint64_t cap = kDefaultEnumerationCap);

  const GameForm& game() const { return *game_; }
  const std::vector<Strategy>& strategies(int agent) const {
    return strategies_[agent];
  }
  const std::vector<ChanceRealization>& realizations() const {
    return realizations_;
  }
  uint64_t OpponentCount(int agent) const;
  // Writes the opponents' strategies into by_agent (size num_agents); the
  // slot of `agent` is left untouched.
  void DecodeOpponents(int agent, uint64_t index,
                       std::vector<const Strategy*>& by_agent) const;
  std::vector<Strategy> OpponentProfile(int agent, uint64_t index) const;

 private:
  const GameForm* game_;
  std::vector<std::vector<Strategy>> strategies_;
  std::vector<ChanceRealization> realizations_;
};

struct Witness {
  std::vector<Strategy> opponents;
  ChanceRealization chance;
};

struct DeparturePoint {
  int info_set = 0;  // global id
  std::vector<Witness> witnesses;
  // Opponent profiles that witness with at least one chance realization.
  std::vector<std::vector<Strategy>> projected;
};

// Earliest points of departure of two strategies of the same agent: the
// information sets where they differ that some (opponents, chance) pair
// reaches under both. Throws Error if the strategies belong to different
// agents.
std::vector<DeparturePoint> DeparturePoints(const GameForm& game,
                                            const Strategy& a,
                                            const Strategy& b);

// Per-agent finite type domains and valuations over a shared outcome list.
class ValuationTable {
 public:
  struct AgentValues {
    std::vector<std::string> types;
    std::vector<std::vector<double>> values;  // [type][outcome]
  };

  ValuationTable() = default;
  // Throws Error if a row has the wrong width, a value leaves
  // [t_inf, t_sup], or t_inf >= t_sup.
  ValuationTable(std::vector<std::string> outcomes,
                 std::vector<AgentValues> agents, double t_inf, double t_sup);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  int num_outcomes() const { return static_cast<int>(outcomes_.size()); }
  int domain_size(int agent) const {
    return static_cast<int>(agents_[agent].types.size());
  }
  std::vector<int> domain_sizes() const;
  double value(int agent, int type, int outcome) const {
    return agents_[agent].values[type][outcome];
  }
  // Throws Error for an unknown outcome label.
  double value(int agent, int type, const std::string& outcome) const;
  int OutcomeIndex(const std::string& label) const;  // -1 if absent
  int TypeIndex(int agent, const std::string& label) const;  // -1 if absent
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const std::vector<std::string>& types(int agent) const {
    return agents_[agent].types;
  }
  double t_inf() const { return t_inf_; }
  double t_sup() const { return t_sup_; }

 private:
  std::vector<std::string> outcomes_;
  std::vector<AgentValues> agents_;
  double t_inf_ = 0.0;
  double t_sup_ = 1.0;
};

}  // namespace osplab

#endif  // OSPLAB_GAME_FORM_H_
