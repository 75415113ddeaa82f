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

#include "osplab/json_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "osplab/common.h"

namespace osplab {
namespace {

[[noreturn]] void Fail(const std::string& path, const std::string& message) {
  throw Error(fmt::format("{}: {}", path.empty() ? "/" : path, message));
}

const Json& Get(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) Fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) Fail(path, fmt::format("missing key '{}'", key));
  return *it;
}

double AsNumber(const Json& j, const std::string& path) {
  if (!j.is_number()) Fail(path, "expected a number");
  return j.get<double>();
}

int AsInt(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) Fail(path, "expected an integer");
  const auto v = j.get<int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    Fail(path, "integer out of range");
  }
  return static_cast<int>(v);
}

std::string AsString(const Json& j, const std::string& path) {
  if (!j.is_string()) Fail(path, "expected a string");
  return j.get<std::string>();
}

const Json& AsArray(const Json& j, const std::string& path) {
  if (!j.is_array()) Fail(path, "expected an array");
  return j;
}

std::vector<double> NumberList(const Json& j, const std::string& path) {
  std::vector<double> out;
  for (size_t k = 0; k < AsArray(j, path).size(); ++k) {
    out.push_back(AsNumber(j[k], fmt::format("{}/{}", path, k)));
  }
  return out;
}

std::vector<std::string> StringList(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  for (size_t k = 0; k < AsArray(j, path).size(); ++k) {
    out.push_back(AsString(j[k], fmt::format("{}/{}", path, k)));
  }
  return out;
}

std::vector<std::vector<double>> NumberMatrix(const Json& j, const std::string& path) {
  std::vector<std::vector<double>> out;
  for (size_t k = 0; k < AsArray(j, path).size(); ++k) {
    out.push_back(NumberList(j[k], fmt::format("{}/{}", path, k)));
  }
  return out;
}

// Line and column (1-based) of a byte offset.
std::pair<size_t, size_t> LineColumn(const std::string& text, size_t offset) {
  size_t line = 1, col = 1;
  for (size_t k = 0; k < std::min(offset, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Json ParseJson(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // The reported byte is one past the offending character.
    const size_t at = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = LineColumn(text, at);
    std::string what = e.what();
    const size_t cut = what.find("syntax error");
    if (cut != std::string::npos) what = what.substr(cut);
    throw Error(fmt::format("{}:{}:{}: {}", source, line, col, what));
  }
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("{}: cannot open file", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseJson(buffer.str(), path);
}

void WriteJsonFile(const std::string& path, const Json& json) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("{}: cannot open file for writing", path));
  out << json.dump(2) << "\n";
  if (!out) throw Error(fmt::format("{}: write failed", path));
}

GameFormSpec GameFormSpecFromJson(const Json& json) {
  GameFormSpec spec;
  const Json& nodes = AsArray(Get(json, "nodes", ""), "/nodes");
  std::map<int, NodeId> index;
  for (size_t k = 0; k < nodes.size(); ++k) {
    const std::string path = fmt::format("/nodes/{}", k);
    const int id = AsInt(Get(nodes[k], "id", path), path + "/id");
    if (!index.emplace(id, static_cast<NodeId>(k)).second) {
      Fail(path + "/id", fmt::format("duplicate node id {}", id));
    }
  }
  auto resolve = [&](int id, const std::string& path) {
    auto it = index.find(id);
    if (it == index.end()) Fail(path, fmt::format("unknown node id {}", id));
    return it->second;
  };
  for (size_t k = 0; k < nodes.size(); ++k) {
    const std::string path = fmt::format("/nodes/{}", k);
    const Json& j = nodes[k];
    Node node;
    const int id = AsInt(j["id"], path + "/id");
    node.label = j.contains("label") ? AsString(j["label"], path + "/label")
                                     : std::to_string(id);
    const std::string kind = AsString(Get(j, "kind", path), path + "/kind");
    if (kind == "player") {
      node.kind = NodeKind::kPlayer;
      node.owner = AsInt(Get(j, "owner", path), path + "/owner");
    } else if (kind == "chance") {
      node.kind = NodeKind::kChance;
    } else if (kind == "terminal") {
      node.kind = NodeKind::kTerminal;
      node.outcome = AsString(Get(j, "outcome", path), path + "/outcome");
    } else {
      Fail(path + "/kind", fmt::format("unknown kind '{}'", kind));
    }
    if (j.contains("edges")) {
      const Json& edges = AsArray(j["edges"], path + "/edges");
      for (size_t e = 0; e < edges.size(); ++e) {
        const std::string ep = fmt::format("{}/edges/{}", path, e);
        Edge edge;
        edge.action = AsString(Get(edges[e], "action", ep), ep + "/action");
        edge.child = resolve(AsInt(Get(edges[e], "child", ep), ep + "/child"), ep + "/child");
        if (node.kind == NodeKind::kChance) {
          edge.prob = AsNumber(Get(edges[e], "prob", ep), ep + "/prob");
        }
        node.edges.push_back(std::move(edge));
      }
    }
    spec.nodes.push_back(std::move(node));
  }
  if (json.contains("info_sets")) {
    const Json& sets = AsArray(json["info_sets"], "/info_sets");
    for (size_t k = 0; k < sets.size(); ++k) {
      const std::string path = fmt::format("/info_sets/{}", k);
      InfoSet set;
      set.agent = AsInt(Get(sets[k], "agent", path), path + "/agent");
      const Json& members = AsArray(Get(sets[k], "nodes", path), path + "/nodes");
      for (size_t m = 0; m < members.size(); ++m) {
        const std::string mp = fmt::format("{}/nodes/{}", path, m);
        set.nodes.push_back(resolve(AsInt(members[m], mp), mp));
      }
      spec.info_sets.push_back(std::move(set));
    }
  }
  spec.root = json.contains("root") ? resolve(AsInt(json["root"], "/root"), "/root") : 0;
  if (json.contains("num_agents")) spec.num_agents = AsInt(json["num_agents"], "/num_agents");
  return spec;
}

Json GameFormSpecToJson(const GameFormSpec& spec) {
  Json out;
  Json nodes = Json::array();
  for (size_t k = 0; k < spec.nodes.size(); ++k) {
    const Node& node = spec.nodes[k];
    Json j;
    j["id"] = k;
    j["label"] = node.label;
    switch (node.kind) {
      case NodeKind::kPlayer:
        j["kind"] = "player";
        j["owner"] = node.owner;
        break;
      case NodeKind::kChance: j["kind"] = "chance"; break;
      case NodeKind::kTerminal:
        j["kind"] = "terminal";
        j["outcome"] = node.outcome;
        break;
    }
    Json edges = Json::array();
    for (const Edge& e : node.edges) {
      Json je;
      je["action"] = e.action;
      je["child"] = e.child;
      if (node.kind == NodeKind::kChance) je["prob"] = e.prob;
      edges.push_back(std::move(je));
    }
    j["edges"] = std::move(edges);
    nodes.push_back(std::move(j));
  }
  out["nodes"] = std::move(nodes);
  Json sets = Json::array();
  for (const InfoSet& s : spec.info_sets) {
    sets.push_back(Json{{"agent", s.agent}, {"nodes", s.nodes}});
  }
  out["info_sets"] = std::move(sets);
  out["root"] = spec.root;
  if (spec.num_agents >= 0) out["num_agents"] = spec.num_agents;
  return out;
}

ValuationTable ValuationsFromJson(const Json& json) {
  std::vector<std::string> outcomes = StringList(Get(json, "outcomes", ""), "/outcomes");
  const double t_inf = AsNumber(Get(json, "t_inf", ""), "/t_inf");
  const double t_sup = AsNumber(Get(json, "t_sup", ""), "/t_sup");
  const Json& agents = AsArray(Get(json, "agents", ""), "/agents");
  std::vector<ValuationTable::AgentValues> rows;
  for (size_t a = 0; a < agents.size(); ++a) {
    const std::string path = fmt::format("/agents/{}", a);
    ValuationTable::AgentValues v;
    v.types = StringList(Get(agents[a], "types", path), path + "/types");
    v.values = NumberMatrix(Get(agents[a], "values", path), path + "/values");
    for (size_t t = 0; t < v.values.size(); ++t) {
      if (v.values[t].size() != outcomes.size()) {
        throw Error(fmt::format("{}/values/{}: expected {} values, got {}", path, t,
                                outcomes.size(), v.values[t].size()));
      }
    }
    rows.push_back(std::move(v));
  }
  return ValuationTable(std::move(outcomes), std::move(rows), t_inf, t_sup);
}

Json ValuationsToJson(const ValuationTable& valuations) {
  Json out;
  out["outcomes"] = valuations.outcomes();
  out["t_inf"] = valuations.t_inf();
  out["t_sup"] = valuations.t_sup();
  Json agents = Json::array();
  for (int a = 0; a < valuations.num_agents(); ++a) {
    Json values = Json::array();
    for (int t = 0; t < valuations.domain_size(a); ++t) {
      Json row = Json::array();
      for (int s = 0; s < valuations.num_outcomes(); ++s) row.push_back(valuations.value(a, t, s));
      values.push_back(std::move(row));
    }
    agents.push_back(Json{{"types", valuations.types(a)}, {"values", std::move(values)}});
  }
  out["agents"] = std::move(agents);
  return out;
}

SignallingMap SignallingFromJson(const Json& json, const GameForm& game,
                                 const ValuationTable& valuations) {
  const Json& agents = AsArray(Get(json, "agents", ""), "/agents");
  if (static_cast<int>(agents.size()) != game.num_agents()) {
    Fail("/agents", fmt::format("lists {} agents, game has {}", agents.size(),
                                game.num_agents()));
  }
  if (valuations.num_agents() != game.num_agents()) {
    Fail("/agents", "valuations and game disagree on the number of agents");
  }
  SignallingMap map;
  map.strategies.resize(game.num_agents());
  for (int a = 0; a < game.num_agents(); ++a) {
    const std::string path = fmt::format("/agents/{}", a);
    if (!agents[a].is_object()) Fail(path, "expected an object keyed by type");
    for (const std::string& type : valuations.types(a)) {
      const std::string tp = path + "/" + type;
      const std::vector<std::string> labels = StringList(Get(agents[a], type, path), tp);
      try {
        map.strategies[a].push_back(StrategyFromLabels(game, a, labels));
      } catch (const Error& e) {
        Fail(tp, e.what());
      }
    }
  }
  return map;
}

Json SignallingToJson(const SignallingMap& signalling, const GameForm& game,
                      const ValuationTable& valuations) {
  Json agents = Json::array();
  for (size_t a = 0; a < signalling.strategies.size(); ++a) {
    Json j = Json::object();
    for (size_t t = 0; t < signalling.strategies[a].size(); ++t) {
      j[valuations.types(static_cast<int>(a))[t]] =
          StrategyLabels(game, signalling.strategies[a][t]);
    }
    agents.push_back(std::move(j));
  }
  return Json{{"agents", std::move(agents)}};
}

namespace {

struct Kind {
  std::string name;
  double constant = 0.0;
  std::vector<std::vector<double>> table;
};

Kind ReadKind(const Json& j, const std::string& kind_key, const std::string& value_key,
              const std::string& path, int types) {
  Kind k;
  k.name = AsString(Get(j, kind_key, path), path + "/" + kind_key);
  if (k.name == "constant") {
    k.constant = AsNumber(Get(j, value_key, path), path + "/" + value_key);
  } else if (k.name == "theorem1") {
    k.constant = AsNumber(Get(j, "gamma", path), path + "/gamma");
    if (!(k.constant > 1.0)) Fail(path + "/gamma", "gamma must exceed 1");
  } else if (k.name == "table") {
    k.table = NumberMatrix(Get(j, "table", path), path + "/table");
    if (static_cast<int>(k.table.size()) != types) {
      Fail(path + "/table", fmt::format("expected {} rows", types));
    }
    for (size_t r = 0; r < k.table.size(); ++r) {
      if (static_cast<int>(k.table[r].size()) != types) {
        Fail(fmt::format("{}/table/{}", path, r), fmt::format("expected {} entries", types));
      }
    }
  } else {
    Fail(path + "/" + kind_key,
         fmt::format("unknown kind '{}' (expected constant|theorem1|table)", k.name));
  }
  return k;
}

// Extremum of the table over lies, i.e. off-diagonal entries.
double OffDiagonal(const std::vector<std::vector<double>>& table, bool want_max) {
  double best = want_max ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  for (size_t r = 0; r < table.size(); ++r) {
    for (size_t t = 0; t < table[r].size(); ++t) {
      if (r == t) continue;
      best = want_max ? std::max(best, table[r][t]) : std::min(best, table[r][t]);
    }
  }
  return std::isfinite(best) ? best : 0.0;
}

}  // namespace

VerificationScheme SchemeFromJson(const Json& json, const ValuationTable& valuations) {
  const Json& agents = AsArray(Get(json, "agents", ""), "/agents");
  const int n = valuations.num_agents();
  if (static_cast<int>(agents.size()) != n) {
    Fail("/agents", fmt::format("lists {} agents, valuations have {}", agents.size(), n));
  }
  const Json* fines = nullptr;
  if (json.contains("fines")) {
    fines = &AsArray(json["fines"], "/fines");
    if (static_cast<int>(fines->size()) != n) {
      Fail("/fines", fmt::format("lists {} agents, valuations have {}", fines->size(), n));
    }
  }
  const double range = valuations.t_sup() - valuations.t_inf();
  std::vector<AgentVerification> out;
  for (int a = 0; a < n; ++a) {
    const std::string path = fmt::format("/agents/{}", a);
    const Json& j = agents[a];
    bool verifiable = true;
    if (j.contains("verifiable")) {
      if (!j["verifiable"].is_boolean()) Fail(path + "/verifiable", "expected a boolean");
      verifiable = j["verifiable"].get<bool>();
    }
    if (!verifiable) {
      out.push_back(UnverifiableAgent());
      continue;
    }
    const int types = valuations.domain_size(a);
    const Kind p = ReadKind(j, "p_kind", "p", path, types);
    if (!fines) Fail("/fines", "verifiable agents need fines");
    const std::string fp = fmt::format("/fines/{}", a);
    const Kind f = ReadKind((*fines)[a], "kind", "F", fp, types);

    AgentVerification v;
    if (p.name == "table") {
      auto table = p.table;
      v.probability = [table](const LieContext& c) { return table[c.reported_type][c.true_type]; };
      v.p_max = OffDiagonal(table, true);
    } else {
      const double value = p.name == "theorem1" ? 1.0 - 1.0 / p.constant : p.constant;
      v.probability = [value](const LieContext&) { return value; };
      v.p_max = value;
    }
    if (f.name == "table") {
      auto table = f.table;
      v.fine = [table](const LieContext& c) { return table[c.reported_type][c.true_type]; };
      v.fine_min = OffDiagonal(table, false);
      v.fine_max = OffDiagonal(table, true);
    } else {
      const double value = f.name == "theorem1" ? f.constant * range : f.constant;
      v.fine = [value](const LieContext&) { return value; };
      v.fine_min = value;
      v.fine_max = value;
    }
    out.push_back(std::move(v));
  }
  return VerificationScheme(std::move(out));
}

Scf ScfFromJson(const Json& json) {
  std::vector<int> domain;
  const Json& d = AsArray(Get(json, "domain", ""), "/domain");
  for (size_t k = 0; k < d.size(); ++k) domain.push_back(AsInt(d[k], fmt::format("/domain/{}", k)));
  std::vector<std::string> outcomes = StringList(Get(json, "outcomes", ""), "/outcomes");
  std::vector<std::vector<double>> rows = NumberMatrix(Get(json, "rows", ""), "/rows");
  return TableScf(std::move(domain), std::move(outcomes), std::move(rows));
}

Json ScfToJson(const Scf& f) {
  Json out;
  out["domain"] = f.domain_sizes;
  out["outcomes"] = f.outcomes;
  ProfileIndexer indexer(f.domain_sizes);
  indexer.Count(kSensitivityCap);
  Json rows = Json::array();
  std::vector<int> b(f.domain_sizes.size(), 0);
  do {
    rows.push_back(f.Scores(b));
  } while (indexer.Next(b));
  out["rows"] = std::move(rows);
  return out;
}

std::vector<ReactionTable> ReactionsFromJson(const Json& json) {
  const Json& tables = AsArray(Get(json, "tables", ""), "/tables");
  std::vector<ReactionTable> out;
  for (size_t k = 0; k < tables.size(); ++k) {
    const std::string path = fmt::format("/tables/{}/values", k);
    const Json& values = AsArray(Get(tables[k], "values", fmt::format("/tables/{}", k)), path);
    ReactionTable table;
    for (size_t t = 0; t < values.size(); ++t) {
      table.values.push_back(NumberMatrix(values[t], fmt::format("{}/{}", path, t)));
    }
    for (size_t t = 0; t < table.values.size(); ++t) {
      if (table.values[t].size() != table.values[0].size()) {
        Fail(fmt::format("{}/{}", path, t), "every type needs the same outcomes");
      }
      for (size_t s = 0; s < table.values[t].size(); ++s) {
        if (table.values[t][s].empty()) {
          Fail(fmt::format("{}/{}/{}", path, t, s), "needs at least one reaction");
        }
        for (double v : table.values[t][s]) {
          if (!(v >= 0.0 && v <= 1.0)) {
            Fail(fmt::format("{}/{}/{}", path, t, s), "values must lie in [0, 1]");
          }
        }
      }
    }
    out.push_back(std::move(table));
  }
  if (out.empty()) Fail("/tables", "needs at least one table");
  return out;
}

Json ReactionsToJson(const std::vector<ReactionTable>& tables) {
  Json arr = Json::array();
  for (const ReactionTable& t : tables) arr.push_back(Json{{"values", t.values}});
  return Json{{"tables", std::move(arr)}};
}

std::unique_ptr<SelectionRule> RuleFromJson(const Json& json, int n) {
  std::map<Record, int> table;
  if (json.contains("entries")) {
    const Json& entries = AsArray(json["entries"], "/entries");
    for (size_t k = 0; k < entries.size(); ++k) {
      const std::string path = fmt::format("/entries/{}", k);
      const Json& rec = AsArray(Get(entries[k], "record", path), path + "/record");
      Record record;
      for (size_t r = 0; r < rec.size(); ++r) {
        const std::string rp = fmt::format("{}/record/{}", path, r);
        if (!rec[r].is_array() || rec[r].size() != 2) Fail(rp, "expected [agent, declared]");
        record.push_back({AsInt(rec[r][0], rp + "/0"), AsInt(rec[r][1], rp + "/1")});
      }
      const int next = AsInt(Get(entries[k], "next", path), path + "/next");
      if (next < 0 || next >= n) Fail(path + "/next", fmt::format("agent {} out of range", next));
      table[record] = next;
    }
  }
  const std::string fallback =
      json.contains("fallback") ? AsString(json["fallback"], "/fallback") : "uniform";
  std::unique_ptr<SelectionRule> base;
  try {
    base = MakeRule(fallback, n);
  } catch (const Error& e) {
    Fail("/fallback", e.what());
  }
  return std::make_unique<TableRule>(std::move(table), std::move(base));
}

}  // namespace osplab
