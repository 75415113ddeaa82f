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

#include "osplab/direct_mechanisms.h"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "osplab/common.h"
#include "test_support.h"

namespace osplab {
namespace {

constexpr double kGapSlack = 1e-9;

SocialChoice Dictator() {
  return [](std::span<const int> b) { return b[0]; };
}

ValuationTable TwoByTwo(double low, double high) {
  using AV = ValuationTable::AgentValues;
  return ValuationTable({"x", "y"}, {AV{{"a", "b"}, {{high, low}, {low, high}}},
                                     AV{{"a", "b"}, {{high, low}, {low, high}}}},
                        0.0, 1.0);
}

TEST(FixedFinesTest, ProbabilityFormula) {
  const ValuationTable v = MatchingValuations(2);
  const DirectMechanism m = BuildFixedFines(MajorityChoice(2), v, {ConstantFine(2), ConstantFine(2)});
  EXPECT_EQ(m.construction, Construction::kFixedFines);
  std::vector<int> b = {1, 0};
  EXPECT_DOUBLE_EQ(m.scheme.Probability({0, 0, 1, b, 1}), 0.5);
  const DirectMechanism tight =
      BuildFixedFines(MajorityChoice(2), v, {ConstantFine(1), ConstantFine(1)});
  EXPECT_DOUBLE_EQ(tight.scheme.Probability({0, 0, 1, b, 1}), 0.0);
}

TEST(FixedFinesTest, ShortfallNamesAgent) {
  try {
    BuildFixedFines(MajorityChoice(2), MatchingValuations(2), {ConstantFine(2), ConstantFine(0.5)});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("agent 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("0.5"), std::string::npos) << msg;
  }
}

TEST(FixedFinesTest, ComplementIsRangeOverFine) {
  for (double fine : {1.0, 1.5, 2.0, 7.0, 20.0}) {
    const DirectMechanism m =
        BuildFixedFines(MajorityChoice(2), MatchingValuations(2), {ConstantFine(fine), ConstantFine(fine)});
    std::vector<int> b = {0, 0};
    EXPECT_NEAR(1.0 - m.scheme.Probability({0, 1, 0, b, 0}), 1.0 / fine, 1e-15);
  }
}

// The displayed chain: truthful value against any reports of the others beats
// any lie against any other reports, once the expected fine is charged.
TEST(FixedFinesTest, DominanceChainByEnumeration) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const testing::DirectInstance inst = testing::RandomDirectInstance(rng, 2, 3, 4);
    const double fine = 1.0 + static_cast<double>(rng.Below(5)) / 4.0;
    const DirectMechanism m = BuildFixedFines(inst.f, inst.valuations, {ConstantFine(fine), ConstantFine(fine)});
    const std::vector<int> sizes = inst.valuations.domain_sizes();
    for (int i = 0; i < 2; ++i) {
      const int j = 1 - i;
      for (int t = 0; t < sizes[i]; ++t) {
        for (int lie = 0; lie < sizes[i]; ++lie) {
          if (lie == t) continue;
          for (int bj = 0; bj < sizes[j]; ++bj) {
            for (int cj = 0; cj < sizes[j]; ++cj) {
              std::vector<int> truthful(2), lying(2);
              truthful[i] = t;
              truthful[j] = bj;
              lying[i] = lie;
              lying[j] = cj;
              const int ot = inst.f(truthful), ol = inst.f(lying);
              const double p = m.scheme.Probability({i, t, lie, lying, ol});
              EXPECT_GE(inst.valuations.value(i, t, ot) + kGapSlack,
                        inst.valuations.value(i, t, ol) - (1 - p) * fine);
            }
          }
        }
      }
    }
  }
}

TEST(Theorem1Test, ExpectedVerifiedIsNOverGamma) {
  for (auto [n, gamma] : std::vector<std::pair<int, double>>{{100, 100}, {10, 2}, {8, 3}, {50, 1.25}}) {
    const DirectMechanism m = BuildTheorem1(MajorityChoice(n), MatchingValuations(n), gamma);
    const DirectSummary s = Summarize(m);
    EXPECT_NEAR(s.expected_verified, n / gamma, 1e-12) << n << " " << gamma;
    EXPECT_DOUBLE_EQ(s.f_min, gamma);
    EXPECT_DOUBLE_EQ(s.p, 1 - 1 / gamma);
  }
  EXPECT_THROW(BuildTheorem1(MajorityChoice(2), MatchingValuations(2), 1.0), Error);
  EXPECT_THROW(BuildTheorem1(MajorityChoice(2), MatchingValuations(2), 0.5), Error);
}

TEST(Theorem1Test, NearOneMeansFullVerification) {
  const DirectMechanism m = BuildTheorem1(MajorityChoice(4), MatchingValuations(4), 1.0 + 1e-9);
  EXPECT_LT(Summarize(m).p, 1e-8);
}

TEST(FixedProbabilitiesTest, TightFines) {
  using AV = ValuationTable::AgentValues;
  const ValuationTable v({"x", "y"}, {AV{{"a", "b"}, {{0.7, 0.0}, {0.0, 1.0}}}}, 0.0, 1.0);
  const SocialChoice f = Dictator();
  std::vector<int> lie_b = {1};
  {
    const DirectMechanism m = BuildFixedProbabilities(f, v, {[](const LieContext&) { return 0.0; }});
    // True a reports b; outcome y is worth 0 to a, so no fine is needed.
    EXPECT_DOUBLE_EQ(m.scheme.Fine({0, 0, 1, lie_b, 1}), 0.0);
    std::vector<int> lie_a = {0};
    EXPECT_DOUBLE_EQ(m.scheme.Fine({0, 1, 0, lie_a, 0}), 0.0);
  }
  {
    // A table where the lie lands on the liked outcome.
    const SocialChoice g = [](std::span<const int> b) { return 1 - b[0]; };
    const DirectMechanism m = BuildFixedProbabilities(g, v, {[](const LieContext&) { return 0.0; }});
    std::vector<int> b = {1};
    EXPECT_DOUBLE_EQ(m.scheme.Fine({0, 0, 1, b, 0}), 0.7);
    const DirectMechanism half = BuildFixedProbabilities(g, v, {[](const LieContext&) { return 0.5; }});
    std::vector<int> a = {0};
    EXPECT_DOUBLE_EQ(half.scheme.Fine({0, 1, 0, a, 1}), 2.0);
  }
  EXPECT_THROW(BuildFixedProbabilities(f, v, {[](const LieContext&) { return 1.0; }}), Error);
}

TEST(FixedProbabilitiesTest, TruthfulProbabilityOneIsAllowed) {
  // Only lies matter for the headroom.
  const SchemeFn p = [](const LieContext& c) { return c.true_type == c.reported_type ? 1.0 : 0.25; };
  const DirectMechanism m = BuildFixedProbabilities(MajorityChoice(2), MatchingValuations(2), {p, p});
  EXPECT_NEAR(testing::DirectOspGap(m), 0.0, kGapSlack);
}

TEST(FixedProbabilitiesTest, RevealingFinesNeverExceedPlainOnes) {
  Rng rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    const testing::DirectInstance inst = testing::RandomDirectInstance(rng, 2, 3, 3);
    const double q = static_cast<double>(rng.Below(4)) / 5.0;
    const SchemeFn p = [q](const LieContext& c) { return q * (c.outcome % 2 ? 1.0 : 0.5); };
    const DirectMechanism plain = BuildFixedProbabilities(inst.f, inst.valuations, {p, p});
    const DirectMechanism rev =
        BuildFixedProbabilities(inst.f, inst.valuations, {p, p}, ValueConsistentRevealing(inst.valuations));
    EXPECT_EQ(rev.construction, Construction::kRevealing);
    const std::vector<int> sizes = inst.valuations.domain_sizes();
    ProfileIndexer ix(sizes);
    std::vector<int> b(2, 0);
    do {
      for (int i = 0; i < 2; ++i) {
        for (int t = 0; t < sizes[i]; ++t) {
          if (t == b[i]) continue;
          const LieContext ctx{i, t, b[i], b, inst.f(b)};
          EXPECT_LE(rev.scheme.Fine(ctx), plain.scheme.Fine(ctx) + 1e-15);
        }
      }
    } while (ix.Next(b));
    EXPECT_LE(testing::DirectOspGap(rev), kGapSlack);
    EXPECT_LE(testing::DirectOspGap(plain), kGapSlack);
  }
}

TEST(FixedProbabilitiesTest, WholeDomainRevealingMatchesPlain) {
  // Some truthful report already realizes t_inf, so the revealed floor is t_inf.
  const ValuationTable v = MatchingValuations(2);
  const SchemeFn p = [](const LieContext&) { return 0.4; };
  const RevealingFn all = [](int, int, int) { return std::vector<int>{0, 1}; };
  const DirectMechanism plain = BuildFixedProbabilities(MajorityChoice(2), v, {p, p});
  const DirectMechanism rev = BuildFixedProbabilities(MajorityChoice(2), v, {p, p}, all);
  for (int b0 = 0; b0 < 2; ++b0) {
    for (int b1 = 0; b1 < 2; ++b1) {
      std::vector<int> b = {b0, b1};
      const LieContext ctx{0, 1 - b0, b0, b, MajorityChoice(2)(b)};
      EXPECT_EQ(plain.scheme.Fine(ctx), rev.scheme.Fine(ctx));
    }
  }
  // With a dictator every truthful report is worth 1, so revealing the whole
  // domain removes the fine entirely.
  const ValuationTable w = TwoByTwo(0.0, 1.0);
  const DirectMechanism dict = BuildFixedProbabilities(Dictator(), w, {p, p}, all);
  std::vector<int> b = {1, 0};
  EXPECT_EQ(dict.scheme.Fine({0, 0, 1, b, 1}), 0.0);
  EXPECT_LE(testing::DirectOspGap(dict), kGapSlack);
  const RevealingFn broken = [](int, int, int) { return std::vector<int>{}; };
  EXPECT_THROW(BuildFixedProbabilities(Dictator(), v, {p, p}, broken), Error);
}

TEST(FixedProbabilitiesTest, LoweringTheAttainedFineBreaksObviousDominance) {
  // Three-agent majority with matching values: a 0-type facing two 1s gets 0
  // from the truth; lying to 1 against two 0s wins outcome 0, worth 1.
  const SchemeFn p = [](const LieContext&) { return 0.5; };
  const DirectMechanism base = BuildFixedProbabilities(MajorityChoice(3), MatchingValuations(3), {p, p, p});
  EXPECT_NEAR(testing::DirectOspGap(base), 0.0, kGapSlack);
  FinePerturbation tweak{0, 0, {1, 0, 0}, -1e-3};
  const DirectMechanism lowered =
      BuildFixedProbabilities(MajorityChoice(3), MatchingValuations(3), {p, p, p}, nullptr, tweak);
  EXPECT_NEAR(testing::DirectOspGap(lowered), 0.5e-3, 1e-12);
}

TEST(GameFormEncodingTest, ShapeAndUtilities) {
  const DirectMechanism m =
      BuildFixedFines(MajorityChoice(2), MatchingValuations(2), {ConstantFine(2), ConstantFine(2)});
  const DirectGame g = AsGameForm(m);
  EXPECT_EQ(g.game->num_agents(), 2);
  EXPECT_EQ(g.game->agent_info_sets(0).size(), 1u);
  EXPECT_EQ(g.game->agent_info_sets(1).size(), 1u);
  EXPECT_EQ(g.game->info_set(g.game->agent_info_sets(1)[0]).nodes.size(), 2u);
  EXPECT_EQ(g.game->num_nodes(), 7u);
  EXPECT_LE(testing::DirectOspGap(m), kGapSlack);
}

TEST(GameFormEncodingTest, WithoutVerificationMajorityIsNotObvious) {
  DirectMechanism m;
  m.f = MajorityChoice(3);
  m.valuations = MatchingValuations(3);
  m.scheme = VerificationScheme({UnverifiableAgent(), UnverifiableAgent(), UnverifiableAgent()});
  EXPECT_GT(testing::DirectOspGap(m), 0.5);
}

TEST(GameFormEncodingTest, ConstantChoiceNeedsNoVerification) {
  DirectMechanism m;
  m.f = [](std::span<const int>) { return 1; };
  m.valuations = MatchingValuations(3);
  m.scheme = VerificationScheme({UnverifiableAgent(), UnverifiableAgent(), UnverifiableAgent()});
  EXPECT_LE(testing::DirectOspGap(m), 0.0);
}

TEST(CurveTest, FineProbabilityCurve) {
  const auto curve = ProbabilityCurve(1.0);
  ASSERT_EQ(curve.size(), 77u);
  EXPECT_EQ(curve.front().fine, 1.0);
  EXPECT_EQ(curve.front().p, 0.0);
  EXPECT_EQ(curve[4].fine, 2.0);
  EXPECT_EQ(curve[4].p, 0.5);
  EXPECT_EQ(curve.back().fine, 20.0);
  for (size_t k = 1; k < curve.size(); ++k) EXPECT_GT(curve[k].p, curve[k - 1].p);
  for (size_t k = 2; k < curve.size(); ++k) {
    EXPECT_LT(curve[k].p - curve[k - 1].p, curve[k - 1].p - curve[k - 2].p);
  }
  // Below the value range the curve is flat at zero.
  for (const CurvePoint& pt : ProbabilityCurve(2.0, 0.5, 2.0, 0.5)) EXPECT_EQ(pt.p, 0.0);
}

TEST(CurveTest, FineSurface) {
  for (const SurfacePoint& pt : FineSurface()) {
    EXPECT_NEAR(pt.fine * (1 - pt.p_max), pt.gap, 1e-12);
  }
}

TEST(ConstructionTest, Names) {
  for (Construction c : {Construction::kFixedFines, Construction::kTheorem1,
                         Construction::kFixedProbabilities, Construction::kRevealing}) {
    EXPECT_EQ(ParseConstruction(ConstructionName(c)), c);
  }
  EXPECT_EQ(ConstructionName(Construction::kRevealing), "mp-rev");
  EXPECT_THROW(ParseConstruction("vcg"), Error);
}

}  // namespace
}  // namespace osplab
