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

#include "osplab/fixtures.h"

#include <filesystem>

#include <fmt/core.h>

#include "osplab/common.h"
#include "osplab/json_io.h"

namespace osplab {
namespace {

Node Player(std::string label, int owner, std::vector<Edge> edges) {
  Node n;
  n.label = std::move(label);
  n.kind = NodeKind::kPlayer;
  n.owner = owner;
  n.edges = std::move(edges);
  return n;
}

Node Chance(std::string label, std::vector<Edge> edges) {
  Node n;
  n.label = std::move(label);
  n.kind = NodeKind::kChance;
  n.edges = std::move(edges);
  return n;
}

Node Terminal(std::string label, std::string outcome) {
  Node n;
  n.label = std::move(label);
  n.kind = NodeKind::kTerminal;
  n.outcome = std::move(outcome);
  return n;
}

}  // namespace

SignallingMap BundledMechanism::Signalling(const GameForm& game) const {
  SignallingMap map;
  map.strategies.resize(labels.size());
  for (size_t a = 0; a < labels.size(); ++a) {
    for (const auto& l : labels[a]) {
      map.strategies[a].push_back(StrategyFromLabels(game, static_cast<int>(a), l));
    }
  }
  return map;
}

BundledMechanism Fig1Mechanism() {
  BundledMechanism m;
  m.name = "fig1";
  m.spec.nodes = {
      Chance("coin", {{"H", 1, 0.5}, {"T", 2, 0.5}}),
      Player("i", 0, {{"S", 3}, {"S'", 4}}),
      Player("j_T", 1, {{"L_T", 7}, {"R_T", 8}}),
      Player("j_H", 1, {{"L_H", 5}, {"R_H", 6}}),
      Terminal("z3", "s3"),
      Terminal("z1", "s1"),
      Terminal("z2", "s2"),
      Terminal("z4", "s4"),
      Terminal("z5", "s5"),
  };
  m.spec.info_sets = {{0, {1}}, {1, {3}}, {1, {2}}};
  m.spec.root = 0;
  m.spec.num_agents = 2;
  m.valuations = ValuationTable(
      {"s1", "s2", "s3", "s4", "s5"},
      {{{"t"}, {{1.0, 0.0, 0.4, 0.5, 0.5}}}, {{"t"}, {{0.0, 0.0, 0.0, 0.0, 0.0}}}}, 0.0,
      1.0);
  m.labels = {{{"S"}}, {{"L_H", "L_T"}}};
  return m;
}

BundledMechanism SecondPriceMechanism() {
  BundledMechanism m;
  m.name = "second_price";
  // Node 0: agent 0 bids. Nodes 1-3: agent 1 bids after b0 = 1, 2, 3.
  m.spec.nodes = {
      Player("b0", 0, {{"bid0=1", 1}, {"bid0=2", 2}, {"bid0=3", 3}}),
      Player("b0=1", 1, {{"bid1=1", 4}, {"bid1=3", 5}}),
      Player("b0=2", 1, {{"bid1=1", 6}, {"bid1=3", 7}}),
      Player("b0=3", 1, {{"bid1=1", 8}, {"bid1=3", 9}}),
      Terminal("z11", "w0p1"),
      Terminal("z13", "w1p1"),
      Terminal("z21", "w0p1"),
      Terminal("z23", "w1p2"),
      Terminal("z31", "w0p1"),
      Terminal("z33", "w0p3"),
  };
  m.spec.info_sets = {{0, {0}}, {1, {1, 2, 3}}};
  m.spec.num_agents = 2;
  const std::vector<std::string> outcomes = {"w0p1", "w0p3", "w1p1", "w1p2"};
  auto row = [](int agent, double t) {
    // Winner pays the price in the label.
    const double w0[] = {t - 1, t - 3, 0, 0};
    const double w1[] = {0, 0, t - 1, t - 2};
    const double* src = agent == 0 ? w0 : w1;
    return std::vector<double>(src, src + 4);
  };
  m.valuations = ValuationTable(
      outcomes,
      {{{"1", "2", "3"}, {row(0, 1), row(0, 2), row(0, 3)}},
       {{"1", "3"}, {row(1, 1), row(1, 3)}}},
      -2.0, 2.0);
  m.labels = {{{"bid0=1"}, {"bid0=2"}, {"bid0=3"}}, {{"bid1=1"}, {"bid1=3"}}};
  return m;
}

BundledMechanism PostedPriceMechanism() {
  BundledMechanism m;
  m.name = "posted_price";
  m.spec.nodes = {
      Player("offer0", 0, {{"accept0", 1}, {"decline0", 2}}),
      Terminal("sold0", "a0"),
      Player("offer1", 1, {{"accept1", 3}, {"decline1", 4}}),
      Terminal("sold1", "a1"),
      Terminal("unsold", "none"),
  };
  m.spec.info_sets = {{0, {0}}, {1, {2}}};
  m.spec.num_agents = 2;
  m.valuations = ValuationTable({"a0", "a1", "none"},
                                {{{"1", "3"}, {{-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}},
                                 {{"1", "3"}, {{0.0, -1.0, 0.0}, {0.0, 1.0, 0.0}}}},
                                -1.0, 1.0);
  m.labels = {{{"decline0"}, {"accept0"}}, {{"decline1"}, {"accept1"}}};
  return m;
}

ReactionTable SampleReactions() {
  ReactionTable t;
  t.values = {{{1.0, 0.0}, {0.8, 0.2}}, {{0.0, 1.0}, {0.3, 0.7}}};
  return t;
}

std::vector<std::vector<std::vector<double>>> ContrarianValues(int n) {
  std::vector<std::vector<double>> agent = {{0.9, 0.1}, {0.2, 0.8}};
  return std::vector<std::vector<std::vector<double>>>(n, agent);
}

std::vector<std::string> EmitFixtures(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("{}: cannot create directory: {}", dir, ec.message()));
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const Json& json) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    WriteJsonFile(path, json);
    written.push_back(path);
  };
  for (const BundledMechanism& m :
       {Fig1Mechanism(), SecondPriceMechanism(), PostedPriceMechanism()}) {
    const GameForm game(m.spec);
    put(m.name + ".json", GameFormSpecToJson(m.spec));
    put(m.name + "_valuations.json", ValuationsToJson(m.valuations));
    put(m.name + "_signalling.json",
        SignallingToJson(m.Signalling(game), game, m.valuations));
  }
  Json scheme;
  scheme["agents"] = Json::array();
  scheme["fines"] = Json::array();
  for (int a = 0; a < 2; ++a) {
    scheme["agents"].push_back(Json{{"verifiable", true}, {"p_kind", "theorem1"}, {"gamma", 2.0}});
    scheme["fines"].push_back(Json{{"kind", "theorem1"}, {"gamma", 2.0}});
  }
  put("theorem1_scheme.json", scheme);
  put("pubproj_rule.json",
      Json{{"entries", Json::array({Json{{"record", Json::array()}, {"next", 9}}})},
           {"fallback", "adaptive"}});
  put("expmech_scores.json", ScfToJson(FractionOfOnes(4)));
  put("reactions.json", ReactionsToJson({SampleReactions()}));
  return written;
}

}  // namespace osplab
