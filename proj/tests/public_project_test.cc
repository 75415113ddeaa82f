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

#include "osplab/public_project.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "osplab/common.h"

namespace osplab {
namespace {

// Inequality form of the verification condition, independent of the interval
// form used by the library.
bool InequalityMustVerify(int n, int c, int n_i, int k_i, bool high) {
  if (high) return n_i <= n + k_i - c && k_i <= c - 1;
  return n_i <= n + k_i - c - 1 && k_i <= c - 2;
}

// A high declaration needs checking exactly when, for some completion of the
// unrevealed agents, switching it to low flips the outcome.
bool HighDeclarationPivotal(int n, int c, int n_i, int k_i) {
  const int rest = n - n_i - 1;
  for (int r = 0; r <= rest; ++r) {
    if ((k_i + 1 + r >= c) != (k_i + r >= c)) return true;
  }
  return false;
}

// Sequential run over a fixed declaration order.
int TauOfSequence(const std::vector<int>& seq, int c) {
  const int n = static_cast<int>(seq.size());
  int k = 0, shown = 0, tau = 0;
  while (k < c && n - shown >= c - k && shown < n) {
    tau += InequalityMustVerify(n, c, shown, k, seq[shown] == 1);
    k += seq[shown];
    ++shown;
  }
  return tau;
}

// Exhaustive over the C(n, c) placements of the ones: under the uniform rule
// the declaration sequence is uniform over them.
struct TauDistribution {
  double prob_below = 0.0;
  double mean = 0.0;
};

TauDistribution EnumerateTau(int n, int c) {
  std::vector<int> seq(n, 0);
  std::fill(seq.end() - c, seq.end(), 1);
  uint64_t total = 0, below = 0;
  double sum = 0.0;
  do {
    const int tau = TauOfSequence(seq, c);
    ++total;
    below += tau < n - c - 1;
    sum += tau;
  } while (std::next_permutation(seq.begin(), seq.end()));
  return {static_cast<double>(below) / total, sum / total};
}

TEST(PublicProjectFunctionTest, Examples) {
  EXPECT_EQ(PublicProjectFunction(std::vector<int>{1, 1, 1, 0, 0}, 3), 1);
  EXPECT_EQ(PublicProjectFunction(std::vector<int>{1, 1, 1, 0, 0}, 4), 0);
  const std::vector<int> two = {1, 0, 1, 0, 0};
  EXPECT_EQ(PublicProjectFunction(two, 2), 1);
  EXPECT_EQ(PublicProjectSumForm(two, 2, 1.0 / 25), 1);
}

TEST(PublicProjectFunctionTest, SumFormAgreesWhenDeltaIsSmall) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(11));
    const int c = static_cast<int>(rng.Below(n + 1));
    std::vector<int> t(n);
    for (int& x : t) x = static_cast<int>(rng.Below(2));
    const PublicProjectInstance inst = PublicProjectInstance::Make(n, c);
    EXPECT_EQ(PublicProjectFunction(t, c), PublicProjectSumForm(t, c, inst.delta));
  }
}

TEST(PublicProjectInstanceTest, Checks) {
  EXPECT_DOUBLE_EQ(PublicProjectInstance::Make(10, 3).delta, 0.01);
  EXPECT_THROW(PublicProjectInstance::Make(10, 11), Error);
  EXPECT_THROW(PublicProjectInstance::Make(10, -1), Error);
  EXPECT_THROW(PublicProjectInstance::Make(10, 3, 0.1), Error);
  EXPECT_NO_THROW(PublicProjectInstance::Make(10, 3, 0.09));
}

TEST(MustVerifyTest, Examples) {
  EXPECT_TRUE(MustVerify(5, 3, 0, 0, false));
  EXPECT_TRUE(MustVerify(5, 3, 4, 2, true));
  EXPECT_FALSE(MustVerify(5, 3, 2, 2, false));
}

TEST(MustVerifyTest, MatchesInequalityAndPivotality) {
  for (int n = 1; n <= 14; ++n) {
    for (int c = 0; c <= n; ++c) {
      for (int n_i = 0; n_i < n; ++n_i) {
        for (int k = 0; k <= n_i; ++k) {
          EXPECT_EQ(MustVerify(n, c, n_i, k, false), InequalityMustVerify(n, c, n_i, k, false));
          EXPECT_EQ(MustVerify(n, c, n_i, k, true), InequalityMustVerify(n, c, n_i, k, true));
          EXPECT_EQ(MustVerify(n, c, n_i, k, true), HighDeclarationPivotal(n, c, n_i, k));
        }
      }
    }
  }
}

TEST(RunSequentialTest, Traces) {
  const auto uniform = UniformRule();
  {
    // c = 1 and the first revealed agent is high.
    const auto rule = FixedOrderRule({2, 0, 1, 3});
    Rng rng(1);
    const Transcript t = RunSequential(PublicProjectInstance::Make(4, 1), std::vector<int>{0, 0, 1, 0}, *rule, rng);
    EXPECT_EQ(t.record.size(), 1u);
    EXPECT_EQ(t.outcome, 1);
    EXPECT_EQ(t.verified, std::vector<int>{2});
    EXPECT_EQ(t.stop, StopReason::kThresholdReached);
  }
  {
    Rng rng(2);
    const Transcript t = RunSequential(PublicProjectInstance::Make(6, 6), std::vector<int>(6, 1), *uniform, rng);
    EXPECT_EQ(t.record.size(), 6u);
    EXPECT_EQ(t.outcome, 1);
    EXPECT_EQ(t.tau, 6);
    EXPECT_EQ(t.verified.back(), t.record.back().agent);
  }
  {
    for (int c = 1; c <= 6; ++c) {
      Rng rng(3);
      const Transcript t = RunSequential(PublicProjectInstance::Make(6, c), std::vector<int>(6, 0), *uniform, rng);
      EXPECT_EQ(static_cast<int>(t.record.size()), 6 - c + 1);
      EXPECT_EQ(t.outcome, 0);
      EXPECT_EQ(t.stop, StopReason::kInfeasible);
    }
  }
  {
    Rng rng(4);
    const Transcript t = RunSequential(PublicProjectInstance::Make(5, 0), std::vector<int>{1, 0, 1, 0, 0}, *uniform, rng);
    EXPECT_EQ(t.tau, 0);
    EXPECT_EQ(t.outcome, 1);
  }
  {
    Rng rng(5);
    const Transcript t =
        RunSequential(PublicProjectInstance::Make(8, 4), std::vector<int>(8, 0), *uniform, rng, 2);
    EXPECT_EQ(t.record.size(), 2u);
    EXPECT_EQ(t.stop, StopReason::kRevelationCap);
    EXPECT_EQ(t.outcome, 0);
  }
  EXPECT_EQ(StopReasonName(StopReason::kAllRevealed), "all-revealed");
}

TEST(RunSequentialPropertyTest, OutcomeAndVerifiedSetAreExact) {
  Rng gen(9);
  const std::vector<std::string> rules = {"uniform", "adaptive", "fixed:identity"};
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + static_cast<int>(gen.Below(14));
    const int c = static_cast<int>(gen.Below(n + 1));
    std::vector<int> t(n);
    for (int& x : t) x = static_cast<int>(gen.Below(2));
    const auto rule = MakeRule(rules[trial % 3], n);
    Rng rng(MixSeed(1, trial));
    const Transcript tr = RunSequential(PublicProjectInstance::Make(n, c), t, *rule, rng);
    EXPECT_EQ(tr.outcome, PublicProjectFunction(t, c));
    EXPECT_EQ(tr.tau, static_cast<int>(tr.verified.size()));
    // Replay: exactly the declarations inside the ranges are verified.
    std::vector<int> expected;
    int k = 0;
    std::vector<char> seen(n, 0);
    for (size_t pos = 0; pos < tr.record.size(); ++pos) {
      const RecordEntry& e = tr.record[pos];
      EXPECT_FALSE(seen[e.agent]);
      seen[e.agent] = 1;
      EXPECT_EQ(e.declared, t[e.agent]);
      if (InequalityMustVerify(n, c, static_cast<int>(pos), k, e.declared == 1)) expected.push_back(e.agent);
      k += e.declared;
    }
    EXPECT_EQ(tr.verified, expected);
  }
}

TEST(ProbTauBelowTest, ClosedFormValues) {
  EXPECT_NEAR(ProbTauBelow(10, 4), 4.0 / 210.0, 1e-12);
  EXPECT_EQ(ProbTauBelow(6, 3), 0.0);
  const double bound = (1 + std::sqrt(100.0)) / (std::exp(1.0) * 101);
  EXPECT_LE(ProbTauBelow(101, 11), bound);
  EXPECT_NEAR(bound, 0.0400, 1e-4);
}

TEST(ProbTauBelowTest, ExactMatchesEnumeration) {
  for (int n = 2; n <= 14; ++n) {
    for (int c = 0; c <= n; ++c) {
      EXPECT_NEAR(ProbTauBelowExact(n, c), EnumerateTau(n, c).prob_below, 1e-12) << n << " " << c;
    }
  }
  // Frozen from the enumeration.
  EXPECT_NEAR(ProbTauBelowExact(10, 4), 7.0 / 210.0, 1e-12);
}

// Beyond its peak the closed form falls with n; before the peak it rises from
// zero (it vanishes for n < 2c + 1).
TEST(ProbTauBelowTest, DecreasingPastThePeak) {
  for (int c = 1; c <= 8; ++c) {
    int peak = 2 * c + 1;
    for (int n = 2 * c + 1; n <= 400; ++n) {
      if (ProbTauBelow(n, c) > ProbTauBelow(peak, c)) peak = n;
    }
    for (int n = peak + 1; n <= 400; ++n) {
      EXPECT_LE(ProbTauBelow(n, c), ProbTauBelow(n - 1, c) * (1 + 1e-12)) << n << " " << c;
    }
    EXPECT_LT(ProbTauBelow(400, c), ProbTauBelow(peak, c));
  }
}

TEST(TauStatisticsTest, MatchesEnumeration) {
  const auto uniform = UniformRule();
  const TauStatistics s = RunTauStatistics(10, 4, *uniform, 20000, 7, 2);
  const TauDistribution d = EnumerateTau(10, 4);
  EXPECT_NEAR(d.mean, 7.6, 1e-12);
  EXPECT_LE(std::abs(s.tau.mean - d.mean), 4 * s.tau.standard_error);
  const double se = std::sqrt(d.prob_below * (1 - d.prob_below) / 20000);
  EXPECT_LE(std::abs(s.prob_below_mc - d.prob_below), 4 * se);
  EXPECT_EQ(s.prob_below_exact, ProbTauBelowExact(10, 4));
  EXPECT_EQ(s.prob_below_closed_form, ProbTauBelow(10, 4));
  EXPECT_DOUBLE_EQ(s.bound_exact, 5 * (1 - s.prob_below_exact));
  uint64_t total = 0;
  for (uint64_t h : s.histogram) total += h;
  EXPECT_EQ(total, 20000u);
  EXPECT_GE(s.tau.mean, s.bound_exact);
}

TEST(TauStatisticsTest, LargerInstanceAgainstExactProbability) {
  const auto uniform = UniformRule();
  const TauStatistics s = RunTauStatistics(100, 11, *uniform, 100000, 11, 4);
  EXPECT_NEAR(s.prob_below_mc, s.prob_below_exact, 0.005);
}

TEST(TauStatisticsTest, DegenerateThresholds) {
  const auto uniform = UniformRule();
  const TauStatistics all = RunTauStatistics(10, 10, *uniform, 200, 1);
  EXPECT_EQ(all.tau.mean, 10.0);
  EXPECT_EQ(all.tau.ci_hi - all.tau.ci_lo, 0.0);
  const TauStatistics none = RunTauStatistics(10, 0, *uniform, 200, 1);
  EXPECT_EQ(none.tau.mean, 0.0);
  EXPECT_THROW(RunTauStatistics(10, 3, *uniform, 0, 1), Error);
}

TEST(TauStatisticsTest, IndependentOfWorkerCount) {
  const auto rule = AdaptiveExtremesRule();
  const TauStatistics a = RunTauStatistics(30, 5, *rule, 3000, 5, 1);
  const TauStatistics b = RunTauStatistics(30, 5, *rule, 3000, 5, 8);
  EXPECT_EQ(a.tau.mean, b.tau.mean);
  EXPECT_EQ(a.histogram, b.histogram);
}

TEST(TauSymmetryTest, PositionsOfOnesDoNotMatter) {
  const auto uniform = UniformRule();
  const PublicProjectInstance inst = PublicProjectInstance::Make(12, 3);
  std::vector<int> front(12, 0), back(12, 0);
  std::fill(front.begin(), front.begin() + 3, 1);
  std::fill(back.end() - 3, back.end(), 1);
  const int trials = 20000;
  std::vector<double> a(trials), b(trials);
  for (int t = 0; t < trials; ++t) {
    Rng r1(MixSeed(3, t)), r2(MixSeed(4, t));
    a[t] = RunSequential(inst, front, *uniform, r1).tau;
    b[t] = RunSequential(inst, back, *uniform, r2).tau;
  }
  const SampleSummary sa = Summarize(a), sb = Summarize(b);
  EXPECT_LE(std::abs(sa.mean - sb.mean), 4 * std::hypot(sa.standard_error, sb.standard_error));
  EXPECT_NEAR(sa.mean, EnumerateTau(12, 3).mean, 4 * sa.standard_error);
}

TEST(CompareRulesTest, UniformAgainstItself) {
  const auto uniform = UniformRule();
  const RuleComparison r = CompareRules(20, 4, *uniform, 20000, 3, 2);
  EXPECT_TRUE(r.within_three_se);
  EXPECT_LT(r.ci_lo, 0.0 + 3 * r.standard_error);
  EXPECT_THROW(CompareRules(20, 4, *uniform, 1, 3), Error);
}

TEST(BayesTest, FormulasAndDegenerateLow) {
  const BayesResult r = BayesExperiment(200, 5, 2.0, 2000, 1, 2);
  EXPECT_DOUBLE_EQ(r.p, 2.0 / (2.0 + 194.0 * 194.0));
  EXPECT_DOUBLE_EQ(r.bound, 4 + 190 * (1 - 2.0 / 194));
  EXPECT_TRUE(r.holds);
  // No high types at all: n - c + 1 revelations, all but the last verified.
  const SampleSummary zero = BayesExperimentWithPrior(50, 5, 0.0, 100, 3);
  EXPECT_EQ(zero.mean, 45.0);
  const SampleSummary one = BayesExperimentWithPrior(50, 5, 1.0, 100, 3);
  EXPECT_EQ(one.mean, 5.0);
}

TEST(EarlyStopTest, ErrorMatchesCount) {
  const EarlyStopResult r = EarlyStopExperiment(12, 3, 40000, 5, 2);
  const double exact = 1 - std::exp(LogBinomial(8, 3) - LogBinomial(12, 3));
  EXPECT_NEAR(r.error_exact, exact, 1e-12);
  const double se = std::sqrt(exact * (1 - exact) / 40000);
  EXPECT_LE(std::abs(r.error_mc - exact), 4 * se);
}

TEST(RuleTest, ParsingAndBehaviour) {
  EXPECT_EQ(MakeRule("uniform", 3)->name(), "uniform");
  EXPECT_THROW(MakeRule("fixed:0,1", 3), Error);
  EXPECT_THROW(MakeRule("fixed:0,x,2", 3), Error);
  EXPECT_THROW(MakeRule("greedy", 3), Error);
  const auto fixed = MakeRule("fixed:2,0,1", 3);
  Rng rng(1);
  Record record;
  std::vector<int> remaining = {0, 1, 2};
  std::vector<char> revealed(3, 0);
  EXPECT_EQ(fixed->Next({record, remaining, revealed}, rng), 2);
  revealed[2] = 1;
  remaining = {0, 1};
  EXPECT_EQ(fixed->Next({record, remaining, revealed}, rng), 0);

  const auto adaptive = AdaptiveExtremesRule();
  record = {{2, 1}};
  EXPECT_EQ(adaptive->Next({record, remaining, revealed}, rng), 1);
  record = {{2, 0}};
  EXPECT_EQ(adaptive->Next({record, remaining, revealed}, rng), 0);

  std::map<Record, int> table = {{Record{}, 1}};
  const TableRule t(table, UniformRule());
  record.clear();
  remaining = {0, 1, 2};
  std::fill(revealed.begin(), revealed.end(), 0);
  EXPECT_EQ(t.Next({record, remaining, revealed}, rng), 1);
}

}  // namespace
}  // namespace osplab
