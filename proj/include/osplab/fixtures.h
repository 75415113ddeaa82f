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

// Small bundled instances used by the tests, the acceptance run and the
// `fixtures` subcommand.

#ifndef OSPLAB_FIXTURES_H_
#define OSPLAB_FIXTURES_H_

#include <string>
#include <vector>

#include "osplab/dominance.h"
#include "osplab/exponential.h"
#include "osplab/game_form.h"

namespace osplab {

struct BundledMechanism {
  std::string name;
  GameFormSpec spec;
  ValuationTable valuations;
  // labels[agent][type]: one action label per information set.
  std::vector<std::vector<std::vector<std::string>>> labels;

  SignallingMap Signalling(const GameForm& game) const;
};

// Coin toss first. On heads agent 0 picks S (agent 1 then picks L_H -> s1 or
// R_H -> s2) or S' (-> s3); on tails agent 1 picks L_T -> s4 or R_T -> s5.
// Agent 0 values s1, s2, s3 at 1, 0, 0.4 and intends to play S.
BundledMechanism Fig1Mechanism();

// Sealed-bid second price auction. Agent 0 bids 1, 2 or 3 first; agent 1 bids
// 1 or 3 without seeing it. Ties go to agent 0; utilities are value minus
// price for the winner. Truthful bidding is intended.
BundledMechanism SecondPriceMechanism();

// Price 2 offered to agent 0, then to agent 1 if agent 0 declines. Types 1
// and 3; high types accept, low types decline.
BundledMechanism PostedPriceMechanism();

// Two types, two outcomes, two reactions; every reaction gap is 1.
ReactionTable SampleReactions();

// values[agent][type][outcome] for the sequential exponential game: type 0
// likes s1, type 1 likes s2.
std::vector<std::vector<std::vector<double>>> ContrarianValues(int n);

// Writes every fixture file into `dir` (created if missing) and returns the
// written paths in a fixed order.
std::vector<std::string> EmitFixtures(const std::string& dir);

}  // namespace osplab

#endif  // OSPLAB_FIXTURES_H_
