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

// Direct-revelation mechanisms with full verification: agents report their
// types at once, the social choice function picks an outcome and every agent
// is verified with some probability and fined if caught lying.

#ifndef OSPLAB_DIRECT_MECHANISMS_H_
#define OSPLAB_DIRECT_MECHANISMS_H_

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "osplab/dominance.h"
#include "osplab/game_form.h"
#include "osplab/verification.h"

namespace osplab {

enum class Construction { kFixedFines, kTheorem1, kFixedProbabilities, kRevealing };

std::string ConstructionName(Construction c);
// Accepts "mf", "t1", "mp", "mp-rev".
Construction ParseConstruction(const std::string& text);

struct DirectMechanism {
  Construction construction = Construction::kFixedFines;
  double gamma = 0.0;  // Theorem1 only
  SocialChoice f;
  ValuationTable valuations;
  VerificationScheme scheme;
};

// Fine function of one agent with its extrema over all lies.
struct FineSchedule {
  SchemeFn fine;
  double min = 0.0;
  double max = 0.0;
};

FineSchedule ConstantFine(double fine);

// Unverified probability (t_inf - t_sup + F_min) / F_max for every agent.
// Throws if some F_min falls short of t_sup - t_inf.
DirectMechanism BuildFixedFines(SocialChoice f, ValuationTable valuations,
                                std::vector<FineSchedule> fines);

// Uniform fines gamma (t_sup - t_inf) and probability 1 - 1/gamma.
DirectMechanism BuildTheorem1(SocialChoice f, ValuationTable valuations,
                              double gamma);

// Moves one fine of a fixed-probability mechanism by `delta`.
struct FinePerturbation {
  int agent = 0;
  int true_type = 0;
  std::vector<int> reports;
  double delta = 0.0;
};

// Revealing map where a caught agent is known to have any type valuing the
// realized outcome as its true type does.
RevealingFn ValueConsistentRevealing(const ValuationTable& valuations);

// Fines at the tight lower bound (t(outcome) - floor) / (1 - p_max), where the
// floor is t_inf, or with a revealing map the least value any type in the
// revealed set can get from truthful play. Throws if any lie goes unverified
// with probability 1.
DirectMechanism BuildFixedProbabilities(
    SocialChoice f, ValuationTable valuations, std::vector<SchemeFn> probabilities,
    RevealingFn revealing = nullptr,
    std::optional<FinePerturbation> perturbation = std::nullopt);

// p_max of agent i at true type t over every lie and opponents' report.
double MaxUnverifiedProbability(const SchemeFn& probability, int i, int t,
                                const std::vector<int>& domain_sizes,
                                const SocialChoice& f);

// Simultaneous-move encoding: agent k picks her report at level k; one
// information set per agent spans the whole level. Utilities are the
// fine-adjusted lying utilities.
struct DirectGame {
  std::unique_ptr<GameForm> game;
  SignallingMap signalling;
  UtilityModel utility;
  std::shared_ptr<const std::vector<std::vector<int>>> terminal_reports;
};

DirectGame AsGameForm(const DirectMechanism& mech,
                      uint64_t cap = kDefaultEnumerationCap);

// Key quantities of a built mechanism for reporting.
struct DirectSummary {
  std::string construction;
  int n = 0;
  double gamma = 0.0;
  double t_inf = 0.0;
  double t_sup = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
  double p = 0.0;  // min over agents of p_max
  double expected_verified = 0.0;  // under truthful reports at profile 0
};

DirectSummary Summarize(const DirectMechanism& mech);

// Probability of no verification against a uniform fine on [from, to] with
// the given step, for value range `range`.
struct CurvePoint {
  double fine = 0.0;
  double p = 0.0;
};
std::vector<CurvePoint> ProbabilityCurve(double range, double from = 1.0,
                                         double to = 20.0, double step = 0.25);

// Tight fine as a function of the value gap and p_max.
struct SurfacePoint {
  double gap = 0.0;
  double p_max = 0.0;
  double fine = 0.0;
};
std::vector<SurfacePoint> FineSurface(int gap_steps = 10, int p_steps = 10,
                                      double p_cap = 0.9);

// Binary-type majority over n agents: outcome 1 iff at least half report 1;
// agent values an outcome 1 iff it matches her type.
SocialChoice MajorityChoice(int n);
ValuationTable MatchingValuations(int n);

}  // namespace osplab

#endif  // OSPLAB_DIRECT_MECHANISMS_H_
