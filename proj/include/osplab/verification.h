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

// Probabilistic verification: per-agent probabilities of letting a report go
// unchecked, fines for caught lies, fine-adjusted utilities and accounting of
// how many agents get verified.
//
// Probabilities and fines are evaluated ex post: they see the full report
// profile and the outcome it produced. On the diagonal (report equals true
// type) the probability is read as the inspection rate of a truthful report;
// truthful reports are inspected but never fined.

#ifndef OSPLAB_VERIFICATION_H_
#define OSPLAB_VERIFICATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "osplab/game_form.h"

namespace osplab {

struct LieContext {
  int agent = 0;
  int true_type = 0;
  int reported_type = 0;
  std::span<const int> reports;  // full report profile, reports[agent] == reported_type
  int outcome = 0;               // outcome index produced by `reports`
};

using SchemeFn = std::function<double(const LieContext&)>;

// Types the agent may still have once a lie is caught, given the realized
// outcome. Must contain the true type.
using RevealingFn =
    std::function<std::vector<int>(int agent, int true_type, int outcome)>;

struct AgentVerification {
  bool verifiable = true;
  SchemeFn probability;  // chance that the report goes unverified
  SchemeFn fine;
  // Closed-form extrema, when known; otherwise computed by enumeration.
  std::optional<double> fine_min;
  std::optional<double> fine_max;
  std::optional<double> p_max;
  RevealingFn revealing;  // empty unless the scheme is revealing
};

AgentVerification ConstantAgent(double p, double fine);
AgentVerification UnverifiableAgent();

// Maps a report profile to the index of the chosen outcome.
using SocialChoice = std::function<int(std::span<const int> reports)>;

struct SchemeExtrema {
  double fine_min = 0.0;
  double fine_max = 0.0;
  double p_max = 0.0;  // over lies only
};

class VerificationScheme {
 public:
  VerificationScheme() = default;
  explicit VerificationScheme(std::vector<AgentVerification> agents);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  const AgentVerification& agent(int i) const { return agents_[i]; }
  bool verifiable(int i) const { return agents_[i].verifiable; }
  bool revealing() const;

  // Unverifiable agents always return 1.
  double Probability(const LieContext& ctx) const;
  double Fine(const LieContext& ctx) const;

  // Extrema over every (true type, lie, opponents' reports) of agent i.
  // Uses the closed forms when present and enumerates the profile space
  // otherwise (Error above `cap` profiles).
  SchemeExtrema Extrema(int i, const std::vector<int>& domain_sizes,
                        const SocialChoice& f,
                        uint64_t cap = kDefaultEnumerationCap) const;

 private:
  std::vector<AgentVerification> agents_;
};

// Problems that make a scheme unusable on the given instance: probabilities
// outside [0,1], negative fines, revealing sets missing the true type.
std::vector<std::string> ValidateScheme(const VerificationScheme& scheme,
                                        const std::vector<int>& domain_sizes,
                                        const SocialChoice& f,
                                        uint64_t cap = kDefaultEnumerationCap);

// t(outcome) - (1 - p) F for a lie; t(outcome) exactly for a truthful report.
double LyingUtility(const ValuationTable& valuations,
                    const VerificationScheme& scheme, const LieContext& ctx);

// Sum over verifiable agents of the inspection probability 1 - p.
double ExpectedVerifiedCount(const VerificationScheme& scheme,
                             std::span<const int> truth,
                             std::span<const int> reports, int outcome);

// Same sum restricted to lying agents.
double ExpectedCaughtCount(const VerificationScheme& scheme,
                           std::span<const int> truth,
                           std::span<const int> reports, int outcome);

struct VerificationDraw {
  std::vector<int> inspected;  // agents whose report was checked
  std::vector<int> caught;     // inspected agents that lied
};

// Inspects agent i independently with probability 1 - p. Deterministic given
// the seed.
VerificationDraw SampleVerification(const VerificationScheme& scheme,
                                    std::span<const int> truth,
                                    std::span<const int> reports, int outcome,
                                    uint64_t seed);

}  // namespace osplab

#endif  // OSPLAB_VERIFICATION_H_
