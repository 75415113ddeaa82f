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

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "osplab/common.h"

namespace osplab {

std::string ConstructionName(Construction c) {
  switch (c) {
    case Construction::kFixedFines: return "mf";
    case Construction::kTheorem1: return "t1";
    case Construction::kFixedProbabilities: return "mp";
    case Construction::kRevealing: return "mp-rev";
  }
  return "?";
}

Construction ParseConstruction(const std::string& text) {
  if (text == "mf") return Construction::kFixedFines;
  if (text == "t1") return Construction::kTheorem1;
  if (text == "mp") return Construction::kFixedProbabilities;
  if (text == "mp-rev") return Construction::kRevealing;
  throw Error(fmt::format("unknown construction '{}' (expected mf|t1|mp|mp-rev)",
                          text));
}

FineSchedule ConstantFine(double fine) {
  return FineSchedule{[fine](const LieContext&) { return fine; }, fine, fine};
}

namespace {

void CheckShape(const SocialChoice& f, const ValuationTable& valuations) {
  if (!f) throw Error("social choice function is empty");
  if (valuations.num_agents() == 0) throw Error("mechanism needs at least one agent");
}

}  // namespace

DirectMechanism BuildFixedFines(SocialChoice f, ValuationTable valuations,
                                std::vector<FineSchedule> fines) {
  CheckShape(f, valuations);
  if (static_cast<int>(fines.size()) != valuations.num_agents()) {
    throw Error(fmt::format("{} fine schedules for {} agents", fines.size(),
                            valuations.num_agents()));
  }
  const double range = valuations.t_sup() - valuations.t_inf();
  std::vector<AgentVerification> agents;
  for (size_t i = 0; i < fines.size(); ++i) {
    const FineSchedule& s = fines[i];
    if (s.min > s.max) {
      throw Error(fmt::format("agent {}: minimum fine {} exceeds maximum {}", i,
                              s.min, s.max));
    }
    if (s.min < range) {
      throw Error(fmt::format(
          "agent {}: minimum fine {} is {} short of the value range {}", i, s.min,
          range - s.min, range));
    }
    const double p = (valuations.t_inf() - valuations.t_sup() + s.min) / s.max;
    AgentVerification a;
    a.probability = [p](const LieContext&) { return p; };
    a.fine = s.fine;
    a.fine_min = s.min;
    a.fine_max = s.max;
    a.p_max = p;
    agents.push_back(std::move(a));
  }
  DirectMechanism m;
  m.construction = Construction::kFixedFines;
  m.f = std::move(f);
  m.valuations = std::move(valuations);
  m.scheme = VerificationScheme(std::move(agents));
  return m;
}

DirectMechanism BuildTheorem1(SocialChoice f, ValuationTable valuations,
                              double gamma) {
  CheckShape(f, valuations);
  if (!(gamma > 1.0)) {
    throw Error(fmt::format("gamma must exceed 1 (got {})", gamma));
  }
  const double fine = gamma * (valuations.t_sup() - valuations.t_inf());
  const double p = 1.0 - 1.0 / gamma;
  std::vector<AgentVerification> agents(valuations.num_agents(),
                                        ConstantAgent(p, fine));
  DirectMechanism m;
  m.construction = Construction::kTheorem1;
  m.gamma = gamma;
  m.f = std::move(f);
  m.valuations = std::move(valuations);
  m.scheme = VerificationScheme(std::move(agents));
  return m;
}

RevealingFn ValueConsistentRevealing(const ValuationTable& valuations) {
  return [valuations](int agent, int true_type, int outcome) {
    std::vector<int> set;
    const double v = valuations.value(agent, true_type, outcome);
    for (int tau = 0; tau < valuations.domain_size(agent); ++tau) {
      if (valuations.value(agent, tau, outcome) == v) set.push_back(tau);
    }
    return set;
  };
}

double MaxUnverifiedProbability(const SchemeFn& probability, int i, int t,
                                const std::vector<int>& domain_sizes,
                                const SocialChoice& f) {
  ProfileIndexer indexer(domain_sizes);
  indexer.Count(kDefaultEnumerationCap);
  std::vector<int> reports(domain_sizes.size(), 0);
  double best = 0.0;
  do {
    if (reports[i] == t) continue;
    const LieContext ctx{i, t, reports[i], reports, f(reports)};
    best = std::max(best, probability(ctx));
  } while (indexer.Next(reports));
  return best;
}

namespace {

// Least truthful value over the types in `set`, over all opponents' reports.
double RevealedFloor(const ValuationTable& valuations, const SocialChoice& f,
                     int i, const std::vector<int>& set) {
  std::vector<int> sizes = valuations.domain_sizes();
  double floor = std::numeric_limits<double>::infinity();
  for (int tau : set) {
    sizes[i] = 1;
    ProfileIndexer indexer(sizes);
    std::vector<int> reports(sizes.size(), 0);
    do {
      reports[i] = tau;
      floor = std::min(floor, valuations.value(i, tau, f(reports)));
      reports[i] = 0;
    } while (indexer.Next(reports));
  }
  return floor;
}

}  // namespace

DirectMechanism BuildFixedProbabilities(SocialChoice f, ValuationTable valuations,
                                        std::vector<SchemeFn> probabilities,
                                        RevealingFn revealing,
                                        std::optional<FinePerturbation> perturbation) {
  CheckShape(f, valuations);
  const int n = valuations.num_agents();
  if (static_cast<int>(probabilities.size()) != n) {
    throw Error(fmt::format("{} probability functions for {} agents",
                            probabilities.size(), n));
  }
  const std::vector<int> sizes = valuations.domain_sizes();
  const int outcomes = valuations.num_outcomes();

  // headroom[i][t] = 1 - p_max(i, t)
  std::vector<std::vector<double>> headroom(n);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < sizes[i]; ++t) {
      const double pm = MaxUnverifiedProbability(probabilities[i], i, t, sizes, f);
      if (pm >= 1.0) {
        throw Error(fmt::format(
            "agent {}: a lie of type {} goes unverified with probability 1", i, t));
      }
      headroom[i].push_back(1.0 - pm);
    }
  }

  // floor[i][t][outcome]
  std::vector<std::vector<std::vector<double>>> floor(n);
  for (int i = 0; i < n; ++i) {
    floor[i].assign(sizes[i], std::vector<double>(outcomes, valuations.t_inf()));
    if (!revealing) continue;
    for (int t = 0; t < sizes[i]; ++t) {
      for (int s = 0; s < outcomes; ++s) {
        const std::vector<int> set = revealing(i, t, s);
        if (std::find(set.begin(), set.end(), t) == set.end()) {
          throw Error(fmt::format(
              "agent {}: revealing set at outcome {} misses true type {}", i, s, t));
        }
        floor[i][t][s] = RevealedFloor(valuations, f, i, set);
      }
    }
  }

  auto shared_valuations = std::make_shared<const ValuationTable>(valuations);
  auto shared_headroom = std::make_shared<const decltype(headroom)>(headroom);
  auto shared_floor = std::make_shared<const decltype(floor)>(floor);
  auto shared_tweak =
      std::make_shared<const std::optional<FinePerturbation>>(perturbation);

  std::vector<AgentVerification> agents;
  for (int i = 0; i < n; ++i) {
    AgentVerification a;
    a.probability = probabilities[i];
    a.fine = [vals = shared_valuations, room = shared_headroom, fl = shared_floor,
              tweak = shared_tweak](const LieContext& ctx) {
      const double v = vals->value(ctx.agent, ctx.true_type, ctx.outcome);
      const double gap = v - (*fl)[ctx.agent][ctx.true_type][ctx.outcome];
      double fine = std::max(0.0, gap / (*room)[ctx.agent][ctx.true_type]);
      const auto& tw = *tweak;
      if (tw && tw->agent == ctx.agent && tw->true_type == ctx.true_type &&
          std::equal(tw->reports.begin(), tw->reports.end(), ctx.reports.begin(),
                     ctx.reports.end())) {
        fine += tw->delta;
      }
      return fine;
    };
    a.revealing = revealing;
    agents.push_back(std::move(a));
  }

  DirectMechanism m;
  m.construction =
      revealing ? Construction::kRevealing : Construction::kFixedProbabilities;
  m.f = std::move(f);
  m.valuations = std::move(valuations);
  m.scheme = VerificationScheme(std::move(agents));
  return m;
}

DirectGame AsGameForm(const DirectMechanism& mech, uint64_t cap) {
  const ValuationTable& vals = mech.valuations;
  const int n = vals.num_agents();
  const std::vector<int> sizes = vals.domain_sizes();
  ProfileIndexer indexer(sizes);
  indexer.Count(cap);

  GameFormSpec spec;
  spec.num_agents = n;
  spec.info_sets.resize(n);
  auto reports = std::make_shared<std::vector<std::vector<int>>>();

  // Breadth-first by level so that node ids grow with depth.
  std::vector<std::vector<int>> frontier = {{}};
  spec.nodes.push_back(Node{});
  std::vector<NodeId> frontier_ids = {0};
  for (int level = 0; level <= n; ++level) {
    std::vector<std::vector<int>> next;
    std::vector<NodeId> next_ids;
    for (size_t k = 0; k < frontier.size(); ++k) {
      const NodeId id = frontier_ids[k];
      const std::vector<int>& prefix = frontier[k];
      Node& node = spec.nodes[id];
      node.label = prefix.empty() ? "root" : "";
      for (int v : prefix) node.label += fmt::format("{}{}", node.label.empty() ? "" : ".", v);
      if (level == n) {
        node.kind = NodeKind::kTerminal;
        node.outcome = vals.outcomes()[mech.f(prefix)];
        node.label = "z:" + node.label;
        continue;
      }
      node.kind = NodeKind::kPlayer;
      node.owner = level;
      spec.info_sets[level].agent = level;
      spec.info_sets[level].nodes.push_back(id);
      for (int t = 0; t < sizes[level]; ++t) {
        const NodeId child = static_cast<NodeId>(spec.nodes.size());
        spec.nodes[id].edges.push_back(
            Edge{fmt::format("a{}:{}", level, vals.types(level)[t]), child, 0.0});
        spec.nodes.push_back(Node{});
        std::vector<int> extended = prefix;
        extended.push_back(t);
        next.push_back(std::move(extended));
        next_ids.push_back(child);
      }
    }
    if (level == n) {
      reports->assign(spec.nodes.size(), {});
      for (size_t k = 0; k < frontier.size(); ++k) {
        (*reports)[frontier_ids[k]] = frontier[k];
      }
      break;
    }
    frontier = std::move(next);
    frontier_ids = std::move(next_ids);
  }
  if (n == 0) throw Error("mechanism needs at least one agent");

  DirectGame out;
  out.game = std::make_unique<GameForm>(std::move(spec));
  out.terminal_reports = reports;
  out.signalling.strategies.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < sizes[i]; ++t) {
      out.signalling.strategies[i].push_back(Strategy{i, {t}});
    }
  }
  auto shared_mech = std::make_shared<const DirectMechanism>(mech);
  out.utility = [m = shared_mech, reports](int agent, int type, NodeId terminal) {
    const std::vector<int>& b = (*reports)[terminal];
    const LieContext ctx{agent, type, b[agent], b, m->f(b)};
    return LyingUtility(m->valuations, m->scheme, ctx);
  };
  return out;
}

DirectSummary Summarize(const DirectMechanism& mech) {
  DirectSummary s;
  s.construction = ConstructionName(mech.construction);
  s.n = mech.valuations.num_agents();
  s.gamma = mech.gamma;
  s.t_inf = mech.valuations.t_inf();
  s.t_sup = mech.valuations.t_sup();
  const std::vector<int> sizes = mech.valuations.domain_sizes();
  const SchemeExtrema e = mech.scheme.Extrema(0, sizes, mech.f);
  s.f_min = e.fine_min;
  s.f_max = e.fine_max;
  s.p = e.p_max;
  for (int i = 1; i < s.n; ++i) {
    const SchemeExtrema ei = mech.scheme.Extrema(i, sizes, mech.f);
    s.f_min = std::min(s.f_min, ei.fine_min);
    s.f_max = std::max(s.f_max, ei.fine_max);
    s.p = std::max(s.p, ei.p_max);
  }
  const std::vector<int> truth(s.n, 0);
  s.expected_verified =
      ExpectedVerifiedCount(mech.scheme, truth, truth, mech.f(truth));
  return s;
}

std::vector<CurvePoint> ProbabilityCurve(double range, double from, double to,
                                         double step) {
  if (!(step > 0.0) || from > to) throw Error("invalid curve grid");
  std::vector<CurvePoint> curve;
  const int steps = static_cast<int>(std::floor((to - from) / step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double fine = from + k * step;
    curve.push_back({fine, fine < range ? 0.0 : (fine - range) / fine});
  }
  return curve;
}

std::vector<SurfacePoint> FineSurface(int gap_steps, int p_steps, double p_cap) {
  std::vector<SurfacePoint> surface;
  for (int g = 0; g <= gap_steps; ++g) {
    for (int k = 0; k <= p_steps; ++k) {
      const double gap = static_cast<double>(g) / gap_steps;
      const double pm = p_cap * k / p_steps;
      surface.push_back({gap, pm, gap / (1.0 - pm)});
    }
  }
  return surface;
}

SocialChoice MajorityChoice(int n) {
  return [n](std::span<const int> reports) {
    int ones = 0;
    for (int r : reports) ones += r;
    return 2 * ones >= n ? 1 : 0;
  };
}

ValuationTable MatchingValuations(int n) {
  ValuationTable::AgentValues agent{{"0", "1"}, {{1.0, 0.0}, {0.0, 1.0}}};
  return ValuationTable({"0", "1"}, std::vector<ValuationTable::AgentValues>(n, agent),
                        0.0, 1.0);
}

}  // namespace osplab
