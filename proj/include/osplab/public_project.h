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

// Sequential public project mechanism: n agents of high (1) or low (delta)
// type; the project is built iff at least c agents are high. Agents reveal one
// at a time in an order chosen by a selection rule, and an agent must be
// verified whenever her declaration can still change the outcome.
//
// Type profiles are vectors of 0/1 where 1 marks a high agent.

#ifndef OSPLAB_PUBLIC_PROJECT_H_
#define OSPLAB_PUBLIC_PROJECT_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osplab/common.h"

namespace osplab {

struct PublicProjectInstance {
  int n = 0;
  int c = 0;
  double delta = 0.0;

  // delta <= 0 selects 1/n^2. Throws unless 0 <= c <= n and delta * n < 1.
  static PublicProjectInstance Make(int n, int c, double delta = 0.0);
};

// 1 iff at least c agents are high.
int PublicProjectFunction(std::span<const int> profile, int c);
// 1 iff the sum of values (1 for high, delta for low) reaches c.
int PublicProjectSumForm(std::span<const int> profile, int c, double delta);

// Whether an agent revealed after n_i others, k_i of them high, must be
// verified when declaring high (declared_high) or low.
bool MustVerify(int n, int c, int n_i, int k_i, bool declared_high);

struct RecordEntry {
  int agent = 0;
  int declared = 0;  // 1 high, 0 low

  bool operator==(const RecordEntry&) const = default;
  auto operator<=>(const RecordEntry&) const = default;
};
using Record = std::vector<RecordEntry>;

// What a selection rule sees when choosing the next agent.
struct SelectionView {
  const Record& record;
  std::span<const int> remaining;   // unrevealed agents, unspecified order
  std::span<const char> revealed;   // revealed[i] != 0 iff i is in the record
};

class SelectionRule {
 public:
  virtual ~SelectionRule() = default;
  virtual std::string name() const = 0;
  // Returns an unrevealed agent. Must be safe to call concurrently.
  virtual int Next(const SelectionView& view, Rng& rng) const = 0;
};

std::unique_ptr<SelectionRule> UniformRule();
// Reveals agents in the order of `order`, a permutation of 0..n-1.
std::unique_ptr<SelectionRule> FixedOrderRule(std::vector<int> order);
// Lowest unrevealed index, or the highest one right after a high declaration.
std::unique_ptr<SelectionRule> AdaptiveExtremesRule();

// Explicit table from records to the next agent, with a fallback rule for
// records the table does not list.
class TableRule : public SelectionRule {
 public:
  TableRule(std::map<Record, int> table, std::unique_ptr<SelectionRule> fallback);
  std::string name() const override { return "table"; }
  int Next(const SelectionView& view, Rng& rng) const override;

 private:
  std::map<Record, int> table_;
  std::unique_ptr<SelectionRule> fallback_;
};

// "uniform", "adaptive", "fixed:identity", "fixed:<comma separated order>".
std::unique_ptr<SelectionRule> MakeRule(const std::string& text, int n);

enum class StopReason { kThresholdReached, kInfeasible, kAllRevealed, kRevelationCap };

std::string StopReasonName(StopReason reason);

struct Transcript {
  Record record;
  int outcome = 0;
  std::vector<int> verified;
  int tau = 0;
  StopReason stop = StopReason::kAllRevealed;
};

// Truthful sequential run. A positive `max_revelations` forces a stop (and
// the not-implement decision unless the threshold is already reached) after
// that many revelations.
Transcript RunSequential(const PublicProjectInstance& instance,
                         std::span<const int> profile, const SelectionRule& rule,
                         Rng& rng, int max_revelations = 0);

// Closed form C(n-c-2, c-1) / C(n, c) for the chance that fewer than n-c-1
// agents get verified, via log-space binomials.
double ProbTauBelow(int n, int c);

// Exact chance of the same event under exactly-c-high profiles, as the
// hypergeometric tail P(at least c-1 high among the first n-c-3 revealers).
double ProbTauBelowExact(int n, int c);

// Profile with exactly c high agents in random positions.
std::vector<int> ExactlyCHighProfile(int n, int c, Rng& rng);

struct TauStatistics {
  int n = 0;
  int c = 0;
  std::string rule;
  SampleSummary tau;
  std::vector<uint64_t> histogram;  // histogram[t] = trials with tau == t
  double prob_below_mc = 0.0;       // fraction of trials with tau < n-c-1
  double prob_below_closed_form = 0.0;
  double prob_below_exact = 0.0;
  double bound_closed_form = 0.0;   // (n-c-1)(1 - closed form)
  double bound_exact = 0.0;         // (n-c-1)(1 - exact)
};

// Trial t draws its profile and runs the rule on stream MixSeed(seed, t).
TauStatistics RunTauStatistics(int n, int c, const SelectionRule& rule,
                               uint64_t trials, uint64_t seed, unsigned threads = 1);

struct RuleComparison {
  SampleSummary rule;
  SampleSummary uniform;
  double difference = 0.0;
  double standard_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool within_three_se = false;
};

// Both rules face independent exactly-c-high profiles; the rule under test
// uses stream 2t and the uniform rule stream 2t+1.
RuleComparison CompareRules(int n, int c, const SelectionRule& rule,
                            uint64_t trials, uint64_t seed, unsigned threads = 1);

struct BayesResult {
  double p = 0.0;  // prior probability of a high type
  SampleSummary tau;
  double bound = 0.0;  // (c-1) + (n-2c)(1 - g/(n-c-1))
  bool holds = false;  // mean >= bound - CI half-width
};

// Types drawn i.i.d. high with probability g / (g + (n-c-1)^2).
BayesResult BayesExperiment(int n, int c, double g, uint64_t trials, uint64_t seed,
                            unsigned threads = 1);
// Same with an explicit prior probability; no bound is evaluated.
SampleSummary BayesExperimentWithPrior(int n, int c, double p, uint64_t trials,
                                       uint64_t seed, unsigned threads = 1);

struct EarlyStopResult {
  double error_mc = 0.0;
  double error_exact = 0.0;  // 1 - C(n-c-1, c) / C(n, c)
};

// Uniform rule cut off after n-c-1 revelations on exactly-c-high profiles.
EarlyStopResult EarlyStopExperiment(int n, int c, uint64_t trials, uint64_t seed,
                                    unsigned threads = 1);

}  // namespace osplab

#endif  // OSPLAB_PUBLIC_PROJECT_H_
