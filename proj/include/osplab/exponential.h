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

// Exponential mechanism with partial verification. Agents reveal in sequence,
// the first n - c of them are verified, and the outcome is drawn with
// probability proportional to exp(beta * score). The imposing variant mixes
// in a uniform draw and forces every agent's reaction to be the one that is
// optimal for her declared type.

#ifndef OSPLAB_EXPONENTIAL_H_
#define OSPLAB_EXPONENTIAL_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "osplab/common.h"
#include "osplab/dominance.h"
#include "osplab/game_form.h"

namespace osplab {

// Score function f(b, s) in [0, 1] over a finite profile space.
struct Scf {
  std::vector<int> domain_sizes;
  std::vector<std::string> outcomes;
  std::function<double(std::span<const int> profile, int outcome)> score;

  int n() const { return static_cast<int>(domain_sizes.size()); }
  int num_outcomes() const { return static_cast<int>(outcomes.size()); }
  std::vector<double> Scores(std::span<const int> profile) const;
};

// Binary domain; outcome "s1" scores the fraction of agents reporting 1 and
// "s2" scores the complement.
Scf FractionOfOnes(int n);

// Scores given row by row in profile order (last agent fastest).
Scf TableScf(std::vector<int> domain_sizes, std::vector<std::string> outcomes,
             std::vector<std::vector<double>> rows);

inline constexpr uint64_t kSensitivityCap = 10'000'000;

// Smallest integer d with every single-report change of a score at most d/n.
// Throws Error above `cap` comparisons.
int Sensitivity(const Scf& f, uint64_t cap = kSensitivityCap);

struct ExpMechConfig {
  int n = 0;
  int c = 0;
  int d = 0;
  double epsilon = 0.0;
  double beta = 0.0;  // n eps / (2 d c); infinity when d c = 0

  // Throws unless epsilon > 0, 0 <= c <= n, d >= 0 and, when `feasible` is
  // set, 4 d c / epsilon < n.
  static ExpMechConfig Make(int n, int c, int d, double epsilon,
                            bool feasible = true);
};

// Softmax with max-subtraction. An infinite beta puts uniform mass on the
// maximal scores.
std::vector<double> ExpMechDistribution(std::span<const double> scores, double beta);

// Draws u uniform on (0, 1] and returns the outcome whose left-open cumulative
// interval holds it.
int SampleOutcome(std::span<const double> distribution, double u);

struct ExpMechRun {
  int outcome = 0;
  std::vector<int> order;     // revelation order
  std::vector<int> verified;  // the first n - c revealers
};

ExpMechRun RunExpMech(std::span<const int> profile, const ExpMechConfig& config,
                      const Scf& f, uint64_t seed, bool shuffle = false);

struct OspGapReport {
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  double ratio_bound = 1.0;  // e^eps
  bool ratio_holds = true;   // both directions within e^eps (1 + 1e-9)
  // Max over pairs of the total-variation distance, which is the largest
  // E_b[v] - E_b'[v] over valuations in [0, 1].
  double max_utility_difference = 0.0;
  bool utility_holds = true;  // <= 2 eps (and <= e^eps - 1)
  std::vector<int> witness_b;
  std::vector<int> witness_b_prime;
  int witness_outcome = 0;
};

// Every pair of profiles agreeing on the first n - c reports.
OspGapReport OspGapCheck(const Scf& f, const ExpMechConfig& config,
                         unsigned threads = 1);

struct ApproxReport {
  double expected_f = 0.0;
  double max_f = 0.0;
  double error = 0.0;
  double bound = 0.0;        // 2 log(beta |S|) / beta
  bool bound_applies = false;  // beta |S| > e
  bool holds = true;
};

ApproxReport ApproxError(std::span<const double> scores, double beta);

// 4 d c / (n eps) log(n eps |S| / (2 d c)).
double ApproxErrorBound(int n, int c, int d, double epsilon, int num_outcomes);

// v[type][outcome][reaction] for one agent.
struct ReactionTable {
  std::vector<std::vector<std::vector<double>>> values;

  int num_types() const { return static_cast<int>(values.size()); }
  int num_outcomes() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
  // Lowest-index maximizer of v[type][outcome][.].
  int BestReaction(int type, int outcome) const;
};

struct ImposingConfig {
  int n = 0;
  int c = 0;
  int d = 0;
  int num_outcomes = 0;
  double gamma = 0.0;
  double epsilon = 0.0;
  double q = 0.0;
  double beta = 0.0;
  int n0 = 0;
  // Per agent: gap(t, b) and its maximizing outcome; gap[t][t] = 0.
  std::vector<std::vector<std::vector<double>>> gap;
  std::vector<std::vector<std::vector<int>>> gap_outcome;
  std::vector<ReactionTable> reactions;  // one per agent, or one shared by all
};

// Smallest integer n0 >= 2 with n0 >= (8 d |S| / gamma) log(gamma / (2 d)) and
// n0 / log n0 > 8 d |S| / gamma.
int ImposingThreshold(int d, int num_outcomes, double gamma);

ImposingConfig BuildImposing(int d, std::vector<ReactionTable> reactions, int n,
                             int c);

// (1 - q) M^beta + q / |S|.
std::vector<double> ImposingDistribution(std::span<const double> scores,
                                         const ImposingConfig& config);

struct ImposingReport {
  double min_margin = 0.0;         // over (agent, t, b != t)
  double required_margin = 0.0;    // gamma / |S|
  bool margin_holds = false;
  double q_gamma_over_s = 0.0;
  bool q_condition_holds = false;  // q gamma / |S| >= 2 eps
  double min_support = 0.0;
  bool support_holds = false;      // every probability >= q / |S|
  double min_truthful_gap = 0.0;   // unverified agents, by count of ones
  bool truthful_gap_positive = false;
  double expected_f_mixture = 0.0;  // at the all-ones profile
  double expected_f_beta = 0.0;
  double max_f = 0.0;
  double final_bound = 0.0;        // max f - (4c+2) sqrt(d|S|/(gamma n)) sqrt(log(n gamma/(2d)))
  bool final_bound_holds = false;
};

// Scores depend only on the number of reports equal to 1 (binary domain).
using CountScores = std::function<std::vector<double>(int ones)>;

CountScores FractionOfOnesByCount(int n);

ImposingReport ImposingMarginCheck(const ImposingConfig& config,
                                   const CountScores& scores);

// Sequential perfect-information encoding of the exponential mechanism on a
// small instance. Each report profile ends in a chance node over outcomes;
// verified agents face a fine equal to their realized value, so any lie they
// tell is worth t_inf = 0.
struct ExpMechGame {
  std::unique_ptr<GameForm> game;
  SignallingMap signalling;
  UtilityModel utility;
};

// `values[agent][type][outcome]` in [0, 1].
ExpMechGame EncodeExpMechGame(const Scf& f, const ExpMechConfig& config,
                              std::vector<std::vector<std::vector<double>>> values);

}  // namespace osplab

#endif  // OSPLAB_EXPONENTIAL_H_
