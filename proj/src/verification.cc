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

#include "osplab/verification.h"

#include <algorithm>
#include <limits>

#include <fmt/core.h>

#include "osplab/common.h"

namespace osplab {

AgentVerification ConstantAgent(double p, double fine) {
  AgentVerification a;
  a.probability = [p](const LieContext&) { return p; };
  a.fine = [fine](const LieContext&) { return fine; };
  a.fine_min = fine;
  a.fine_max = fine;
  a.p_max = p;
  return a;
}

AgentVerification UnverifiableAgent() {
  AgentVerification a;
  a.verifiable = false;
  a.probability = [](const LieContext&) { return 1.0; };
  a.fine = [](const LieContext&) { return 0.0; };
  a.fine_min = 0.0;
  a.fine_max = 0.0;
  a.p_max = 1.0;
  return a;
}

VerificationScheme::VerificationScheme(std::vector<AgentVerification> agents)
    : agents_(std::move(agents)) {
  for (size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].verifiable && (!agents_[i].probability || !agents_[i].fine)) {
      throw Error(fmt::format("agent {}: verifiable agent needs both a "
                              "probability and a fine",
                              i));
    }
  }
}

bool VerificationScheme::revealing() const {
  return std::any_of(agents_.begin(), agents_.end(),
                     [](const AgentVerification& a) { return bool(a.revealing); });
}

double VerificationScheme::Probability(const LieContext& ctx) const {
  const AgentVerification& a = agents_[ctx.agent];
  if (!a.verifiable) return 1.0;
  return a.probability(ctx);
}

double VerificationScheme::Fine(const LieContext& ctx) const {
  const AgentVerification& a = agents_[ctx.agent];
  if (!a.verifiable) return 0.0;
  return a.fine(ctx);
}

namespace {

// Calls visit(ctx) for every lie of agent i over the whole profile space.
template <typename Visit>
void ForEachLie(int i, const std::vector<int>& domain_sizes, const SocialChoice& f,
                uint64_t cap, Visit visit) {
  ProfileIndexer indexer(domain_sizes);
  indexer.Count(cap);
  std::vector<int> reports(domain_sizes.size(), 0);
  do {
    const int outcome = f(reports);
    for (int t = 0; t < domain_sizes[i]; ++t) {
      if (t == reports[i]) continue;
      visit(LieContext{i, t, reports[i], reports, outcome});
    }
  } while (indexer.Next(reports));
}

}  // namespace

SchemeExtrema VerificationScheme::Extrema(int i,
                                          const std::vector<int>& domain_sizes,
                                          const SocialChoice& f,
                                          uint64_t cap) const {
  const AgentVerification& a = agents_[i];
  SchemeExtrema e;
  if (a.fine_min && a.fine_max && a.p_max) {
    e.fine_min = *a.fine_min;
    e.fine_max = *a.fine_max;
    e.p_max = *a.p_max;
    return e;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double pm = 0.0;
  bool any = false;
  ForEachLie(i, domain_sizes, f, cap, [&](const LieContext& ctx) {
    any = true;
    const double fine = Fine(ctx);
    lo = std::min(lo, fine);
    hi = std::max(hi, fine);
    pm = std::max(pm, Probability(ctx));
  });
  if (!any) lo = hi = 0.0;
  e.fine_min = a.fine_min.value_or(lo);
  e.fine_max = a.fine_max.value_or(hi);
  e.p_max = a.p_max.value_or(pm);
  return e;
}

std::vector<std::string> ValidateScheme(const VerificationScheme& scheme,
                                        const std::vector<int>& domain_sizes,
                                        const SocialChoice& f, uint64_t cap) {
  std::vector<std::string> problems;
  if (scheme.num_agents() != static_cast<int>(domain_sizes.size())) {
    problems.push_back(fmt::format("scheme covers {} agents, instance has {}",
                                   scheme.num_agents(), domain_sizes.size()));
    return problems;
  }
  ProfileIndexer indexer(domain_sizes);
  indexer.Count(cap);
  for (int i = 0; i < scheme.num_agents(); ++i) {
    if (!scheme.verifiable(i)) continue;
    const AgentVerification& a = scheme.agent(i);
    bool bad_p = false, bad_fine = false, bad_set = false;
    std::vector<int> reports(domain_sizes.size(), 0);
    do {
      const int outcome = f(reports);
      for (int t = 0; t < domain_sizes[i]; ++t) {
        const LieContext ctx{i, t, reports[i], reports, outcome};
        const double p = a.probability(ctx);
        if (!bad_p && !(p >= 0.0 && p <= 1.0)) {
          bad_p = true;
          problems.push_back(fmt::format(
              "agent {}: probability {} outside [0,1] (true type {}, report {})",
              i, p, t, reports[i]));
        }
        if (t == reports[i]) continue;
        const double fine = a.fine(ctx);
        if (!bad_fine && !(fine >= 0.0)) {
          bad_fine = true;
          problems.push_back(fmt::format(
              "agent {}: negative fine {} (true type {}, report {})", i, fine, t,
              reports[i]));
        }
        if (a.revealing && !bad_set) {
          const std::vector<int> set = a.revealing(i, t, outcome);
          if (std::find(set.begin(), set.end(), t) == set.end()) {
            bad_set = true;
            problems.push_back(fmt::format(
                "agent {}: revealing set misses true type {} at outcome {}", i, t,
                outcome));
          }
        }
      }
    } while (indexer.Next(reports));
  }
  return problems;
}

double LyingUtility(const ValuationTable& valuations,
                    const VerificationScheme& scheme, const LieContext& ctx) {
  const double value = valuations.value(ctx.agent, ctx.true_type, ctx.outcome);
  if (ctx.true_type == ctx.reported_type) return value;
  return value - (1.0 - scheme.Probability(ctx)) * scheme.Fine(ctx);
}

namespace {

double InspectionSum(const VerificationScheme& scheme, std::span<const int> truth,
                     std::span<const int> reports, int outcome, bool lies_only) {
  if (truth.size() != reports.size() ||
      static_cast<int>(truth.size()) != scheme.num_agents()) {
    throw Error("profile sizes do not match the scheme");
  }
  double sum = 0.0;
  for (int i = 0; i < scheme.num_agents(); ++i) {
    if (!scheme.verifiable(i)) continue;
    if (lies_only && truth[i] == reports[i]) continue;
    sum += 1.0 - scheme.Probability({i, truth[i], reports[i], reports, outcome});
  }
  return sum;
}

}  // namespace

double ExpectedVerifiedCount(const VerificationScheme& scheme,
                             std::span<const int> truth,
                             std::span<const int> reports, int outcome) {
  return InspectionSum(scheme, truth, reports, outcome, false);
}

double ExpectedCaughtCount(const VerificationScheme& scheme,
                           std::span<const int> truth,
                           std::span<const int> reports, int outcome) {
  return InspectionSum(scheme, truth, reports, outcome, true);
}

VerificationDraw SampleVerification(const VerificationScheme& scheme,
                                    std::span<const int> truth,
                                    std::span<const int> reports, int outcome,
                                    uint64_t seed) {
  if (truth.size() != reports.size() ||
      static_cast<int>(truth.size()) != scheme.num_agents()) {
    throw Error("profile sizes do not match the scheme");
  }
  Rng rng(seed);
  VerificationDraw draw;
  for (int i = 0; i < scheme.num_agents(); ++i) {
    if (!scheme.verifiable(i)) continue;
    const double p = scheme.Probability({i, truth[i], reports[i], reports, outcome});
    if (rng.Uniform01() < 1.0 - p) {
      draw.inspected.push_back(i);
      if (truth[i] != reports[i]) draw.caught.push_back(i);
    }
  }
  return draw;
}

}  // namespace osplab
