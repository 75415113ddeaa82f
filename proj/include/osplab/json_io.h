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

// JSON readers and writers for every file the command line consumes.
//
// Syntax errors are reported as "file:line:col: message"; schema errors name
// the offending JSON pointer, e.g. "fig1.json: /nodes/3/kind: ...".

#ifndef OSPLAB_JSON_IO_H_
#define OSPLAB_JSON_IO_H_

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "osplab/dominance.h"
#include "osplab/exponential.h"
#include "osplab/game_form.h"
#include "osplab/public_project.h"
#include "osplab/verification.h"

namespace osplab {

using Json = nlohmann::ordered_json;

Json ParseJson(const std::string& text, const std::string& source);
Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& json);

// Mechanism file: {"nodes": [{"id", "kind", "owner"?, "edges": [{"action",
// "child", "prob"?}], "outcome"?, "label"?}], "info_sets": [{"agent",
// "nodes"}], "root", "num_agents"?}. Node ids are arbitrary distinct integers.
GameFormSpec GameFormSpecFromJson(const Json& json);
Json GameFormSpecToJson(const GameFormSpec& spec);

// {"outcomes": [...], "t_inf", "t_sup", "agents": [{"types": [...],
//  "values": [[v(type, outcome)...]...]}]}
ValuationTable ValuationsFromJson(const Json& json);
Json ValuationsToJson(const ValuationTable& valuations);

// {"agents": [{"<type label>": ["action label", ...], ...}, ...]}: for each
// agent and type, one action label per information set.
SignallingMap SignallingFromJson(const Json& json, const GameForm& game,
                                 const ValuationTable& valuations);
Json SignallingToJson(const SignallingMap& signalling, const GameForm& game,
                      const ValuationTable& valuations);

// {"agents": [{"verifiable", "p_kind": "constant"|"theorem1"|"table", "p"?,
//  "gamma"?, "table"?}], "fines": [{"kind": same, "F"?, "gamma"?, "table"?}]}.
// Tables are indexed [reported type][true type].
VerificationScheme SchemeFromJson(const Json& json, const ValuationTable& valuations);

// {"domain": [sizes], "outcomes": [...], "rows": [[score per outcome]...]}
Scf ScfFromJson(const Json& json);
Json ScfToJson(const Scf& f);

// {"tables": [{"values": [[[v]]]}]}; a single table applies to every agent.
std::vector<ReactionTable> ReactionsFromJson(const Json& json);
Json ReactionsToJson(const std::vector<ReactionTable>& tables);

// {"entries": [{"record": [[agent, declared], ...], "next": agent}],
//  "fallback": "uniform"|"adaptive"|"fixed:..."}
std::unique_ptr<SelectionRule> RuleFromJson(const Json& json, int n);

// Wraps a schema error with the file name.
template <typename T, typename F>
T LoadFile(const std::string& path, F parse) {
  const Json json = ReadJsonFile(path);
  try {
    return parse(json);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace osplab

#endif  // OSPLAB_JSON_IO_H_
