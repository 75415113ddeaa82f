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

#include "osplab/exponential.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

namespace osplab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> Scf::Scores(std::span<const int> profile) const {
  std::vector<double> s(outcomes.size());
  for (size_t k = 0; k < s.size(); ++k) s[k] = score(profile, static_cast<int>(k));
  return s;
}

Scf FractionOfOnes(int n) {
  if (n < 1) throw Error("FractionOfOnes needs n >= 1");
  Scf f;
  f.domain_sizes.assign(n, 2);
  f.outcomes = {"s1", "s2"};
  f.score = [n](std::span<const int> b, int s) {
    const double frac =
        static_cast<double>(std::count(b.begin(), b.end(), 1)) / static_cast<double>(n);
    return s == 0 ? frac : 1.0 - frac;
  };
  return f;
}

Scf TableScf(std::vector<int> domain_sizes, std::vector<std::string> outcomes,
             std::vector<std::vector<double>> rows) {
  ProfileIndexer indexer(domain_sizes);
  const uint64_t count = indexer.Count(kSensitivityCap);
  if (rows.size() != count) {
    throw Error(fmt::format("score table has {} rows, profile space has {}",
                            rows.size(), count));
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != outcomes.size()) {
      throw Error(fmt::format("score row {} has {} entries, expected {}", r,
                              rows[r].size(), outcomes.size()));
    }
    for (double v : rows[r]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(fmt::format("score row {} has value {} outside [0, 1]", r, v));
      }
    }
  }
  Scf f;
  f.domain_sizes = domain_sizes;
  f.outcomes = std::move(outcomes);
  auto table = std::make_shared<const std::vector<std::vector<double>>>(std::move(rows));
  f.score = [indexer, table](std::span<const int> b, int s) {
    return (*table)[indexer.Index(b)][s];
  };
  return f;
}

int Sensitivity(const Scf& f, uint64_t cap) {
  const int n = f.n();
  ProfileIndexer indexer(f.domain_sizes);
  const uint64_t profiles = indexer.Count(cap);
  uint64_t work = 0;
  for (int i = 0; i < n; ++i) {
    const uint64_t per = static_cast<uint64_t>(f.domain_sizes[i]) * f.num_outcomes();
    if (profiles > 0 && per > (cap - work) / profiles) {
      throw Error(fmt::format(
          "sensitivity sweep exceeds {} comparisons; declare d instead", cap));
    }
    work += profiles * per;
  }
  double worst = 0.0;
  std::vector<int> b(n, 0);
  do {
    const std::vector<double> base = f.Scores(b);
    for (int i = 0; i < n; ++i) {
      const int own = b[i];
      for (int t = own + 1; t < f.domain_sizes[i]; ++t) {
        b[i] = t;
        for (int s = 0; s < f.num_outcomes(); ++s) {
          worst = std::max(worst, std::abs(f.score(b, s) - base[s]));
        }
      }
      b[i] = own;
    }
  } while (indexer.Next(b));
  return static_cast<int>(std::ceil(worst * n - 1e-9));
}

ExpMechConfig ExpMechConfig::Make(int n, int c, int d, double epsilon, bool feasible) {
  if (n < 1) throw Error("n must be positive");
  if (c < 0 || c > n) throw Error(fmt::format("c must lie in [0, n] (got {})", c));
  if (d < 0) throw Error("sensitivity must be non-negative");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (feasible && !(4.0 * d * c / epsilon < n)) {
    throw Error(fmt::format(
        "infeasible parameters: 4 d c / epsilon = {} is not below n = {}",
        4.0 * d * c / epsilon, n));
  }
  ExpMechConfig cfg{n, c, d, epsilon, 0.0};
  cfg.beta = d * c == 0 ? kInf : n * epsilon / (2.0 * d * c);
  return cfg;
}

std::vector<double> ExpMechDistribution(std::span<const double> scores, double beta) {
  if (!(beta >= 0.0)) throw Error("beta must be non-negative");
  std::vector<double> p(scores.size(), 0.0);
  if (scores.empty()) return p;
  const double top = *std::max_element(scores.begin(), scores.end());
  if (std::isinf(beta)) {
    int ties = 0;
    for (double s : scores) ties += s == top;
    for (size_t k = 0; k < scores.size(); ++k) p[k] = scores[k] == top ? 1.0 / ties : 0.0;
    return p;
  }
  double total = 0.0;
  for (size_t k = 0; k < scores.size(); ++k) {
    p[k] = std::exp(beta * (scores[k] - top));
    total += p[k];
  }
  for (double& x : p) x /= total;
  return p;
}

int SampleOutcome(std::span<const double> distribution, double u) {
  double cumulative = 0.0;
  int last_positive = 0;
  for (size_t k = 0; k < distribution.size(); ++k) {
    if (distribution[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    cumulative += distribution[k];
    if (u <= cumulative) return static_cast<int>(k);
  }
  return last_positive;  // rounding left u just above the final sum
}

ExpMechRun RunExpMech(std::span<const int> profile, const ExpMechConfig& config,
                      const Scf& f, uint64_t seed, bool shuffle) {
  if (static_cast<int>(profile.size()) != config.n || f.n() != config.n) {
    throw Error("profile, score function and config disagree on n");
  }
  Rng rng(seed);
  ExpMechRun run;
  run.order.resize(config.n);
  std::iota(run.order.begin(), run.order.end(), 0);
  if (shuffle) rng.Shuffle(std::span<int>(run.order));
  run.verified.assign(run.order.begin(), run.order.begin() + (config.n - config.c));
  const std::vector<double> dist = ExpMechDistribution(f.Scores(profile), config.beta);
  run.outcome = SampleOutcome(dist, rng.UniformOpenClosed());
  return run;
}

OspGapReport OspGapCheck(const Scf& f, const ExpMechConfig& config, unsigned threads) {
  const int n = f.n();
  if (n != config.n) throw Error("score function and config disagree on n");
  const int verified = n - config.c;
  std::vector<int> head(f.domain_sizes.begin(), f.domain_sizes.begin() + verified);
  std::vector<int> tail(f.domain_sizes.begin() + verified, f.domain_sizes.end());
  ProfileIndexer heads(head);
  ProfileIndexer tails(tail);
  const uint64_t head_count = heads.Count(kSensitivityCap);
  const uint64_t tail_count = tails.Count(kSensitivityCap);
  if (tail_count > kSensitivityCap / tail_count ||
      tail_count * tail_count > kSensitivityCap / head_count) {
    throw Error("profile pair space too large for an exhaustive check");
  }

  struct Partial {
    double max_ratio = 1.0;
    double min_ratio = 1.0;
    double tv = 0.0;
    uint64_t b = 0, b_prime = 0;
    int outcome = 0;
    bool has_witness = false;
  };
  std::vector<Partial> parts(head_count);
  ParallelFor(head_count, threads, [&](size_t h) {
    Partial& part = parts[h];
    const std::vector<int> prefix = heads.Profile(h);
    std::vector<std::vector<double>> dists(tail_count);
    std::vector<int> profile(n);
    std::copy(prefix.begin(), prefix.end(), profile.begin());
    for (uint64_t s = 0; s < tail_count; ++s) {
      const std::vector<int> suffix = tails.Profile(s);
      std::copy(suffix.begin(), suffix.end(), profile.begin() + verified);
      dists[s] = ExpMechDistribution(f.Scores(profile), config.beta);
    }
    for (uint64_t a = 0; a < tail_count; ++a) {
      for (uint64_t b = 0; b < tail_count; ++b) {
        if (a == b) continue;
        double tv = 0.0;
        for (size_t k = 0; k < dists[a].size(); ++k) {
          const double pa = dists[a][k], pb = dists[b][k];
          tv += std::max(0.0, pa - pb);
          double ratio;
          if (pa == 0.0 && pb == 0.0) continue;
          ratio = pb == 0.0 ? kInf : pa / pb;
          if (ratio > part.max_ratio) {
            part.max_ratio = ratio;
            part.b = h * tail_count + a;
            part.b_prime = h * tail_count + b;
            part.outcome = static_cast<int>(k);
            part.has_witness = true;
          }
          part.min_ratio = std::min(part.min_ratio, ratio);
        }
        part.tv = std::max(part.tv, tv);
      }
    }
  });

  OspGapReport r;
  r.ratio_bound = std::exp(config.epsilon);
  bool has_witness = false;
  uint64_t wb = 0, wbp = 0;
  for (const Partial& p : parts) {
    if (p.has_witness && (!has_witness || p.max_ratio > r.max_ratio)) {
      has_witness = true;
      r.max_ratio = p.max_ratio;
      wb = p.b;
      wbp = p.b_prime;
      r.witness_outcome = p.outcome;
    }
    r.min_ratio = std::min(r.min_ratio, p.min_ratio);
    r.max_utility_difference = std::max(r.max_utility_difference, p.tv);
  }
  const double slack = 1.0 + 1e-9;
  r.ratio_holds = r.max_ratio <= r.ratio_bound * slack &&
                  r.min_ratio * r.ratio_bound * slack >= 1.0;
  r.utility_holds =
      r.max_utility_difference <= 2.0 * config.epsilon + kComparisonSlack &&
      r.max_utility_difference <= std::expm1(config.epsilon) + kComparisonSlack;
  if (has_witness) {
    auto decode = [&](uint64_t index) {
      std::vector<int> b = heads.Profile(index / tail_count);
      const std::vector<int> s = tails.Profile(index % tail_count);
      b.insert(b.end(), s.begin(), s.end());
      return b;
    };
    r.witness_b = decode(wb);
    r.witness_b_prime = decode(wbp);
  }
  return r;
}

ApproxReport ApproxError(std::span<const double> scores, double beta) {
  ApproxReport r;
  if (scores.empty()) return r;
  const std::vector<double> p = ExpMechDistribution(scores, beta);
  for (size_t k = 0; k < p.size(); ++k) r.expected_f += p[k] * scores[k];
  r.max_f = *std::max_element(scores.begin(), scores.end());
  r.error = std::max(0.0, r.max_f - r.expected_f);
  const double bs = beta * static_cast<double>(scores.size());
  r.bound_applies = std::isfinite(beta) && bs > std::exp(1.0);
  r.bound = r.bound_applies ? 2.0 * std::log(bs) / beta : kInf;
  r.holds = !r.bound_applies || r.error <= r.bound + kComparisonSlack;
  return r;
}

double ApproxErrorBound(int n, int c, int d, double epsilon, int num_outcomes) {
  const double dc = static_cast<double>(d) * c;
  if (dc == 0.0) return 0.0;
  return 4.0 * dc / (n * epsilon) * std::log(n * epsilon * num_outcomes / (2.0 * dc));
}

int ReactionTable::BestReaction(int type, int outcome) const {
  const std::vector<double>& row = values[type][outcome];
  return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
}

int ImposingThreshold(int d, int num_outcomes, double gamma) {
  if (!(gamma > 0.0) || d <= 0) throw Error("threshold needs gamma > 0 and d > 0");
  const double k = 8.0 * d * num_outcomes / gamma;
  const double first = k * std::log(gamma / (2.0 * d));
  for (int m = 2;; ++m) {
    if (m >= first && m / std::log(static_cast<double>(m)) > k) return m;
    if (m == std::numeric_limits<int>::max()) throw Error("threshold overflow");
  }
}

ImposingConfig BuildImposing(int d, std::vector<ReactionTable> reactions, int n,
                             int c) {
  if (reactions.empty()) throw Error("reaction tables are empty");
  if (c < 1) throw Error("imposing mechanism needs c >= 1");
  if (n < 1 || c > n) throw Error("need 1 <= c <= n");
  if (d < 1) throw Error("imposing mechanism needs sensitivity d >= 1");
  if (reactions.size() != 1 && static_cast<int>(reactions.size()) != n) {
    throw Error(fmt::format("expected 1 or {} reaction tables, got {}", n,
                            reactions.size()));
  }
  ImposingConfig cfg;
  cfg.n = n;
  cfg.c = c;
  cfg.d = d;
  cfg.num_outcomes = reactions[0].num_outcomes();
  cfg.gamma = kInf;
  for (const ReactionTable& table : reactions) {
    if (table.num_outcomes() != cfg.num_outcomes || table.num_types() < 2) {
      throw Error("reaction tables need a common outcome set and two or more types");
    }
    const int types = table.num_types();
    std::vector<std::vector<double>> gap(types, std::vector<double>(types, 0.0));
    std::vector<std::vector<int>> arg(types, std::vector<int>(types, 0));
    for (int t = 0; t < types; ++t) {
      for (int b = 0; b < types; ++b) {
        if (b == t) continue;
        double best = -kInf;
        for (int s = 0; s < cfg.num_outcomes; ++s) {
          const double g = table.values[t][s][table.BestReaction(t, s)] -
                           table.values[t][s][table.BestReaction(b, s)];
          if (g > best) {
            best = g;
            arg[t][b] = s;
          }
        }
        gap[t][b] = best;
        cfg.gamma = std::min(cfg.gamma, best);
      }
    }
    cfg.gap.push_back(std::move(gap));
    cfg.gap_outcome.push_back(std::move(arg));
  }
  if (!(cfg.gamma > 0.0)) throw Error("reactions do not influence utility (gamma = 0)");
  cfg.n0 = ImposingThreshold(d, cfg.num_outcomes, cfg.gamma);
  if (n <= cfg.n0) {
    throw Error(fmt::format("n = {} does not exceed the threshold n0 = {}", n, cfg.n0));
  }
  const double s = cfg.num_outcomes;
  cfg.epsilon = std::sqrt(cfg.gamma * d / (s * n)) *
                std::sqrt(std::log(n * cfg.gamma / (2.0 * d)));
  cfg.q = 2.0 * s * cfg.epsilon / cfg.gamma;
  cfg.beta = n * cfg.epsilon / (2.0 * d * c);
  cfg.reactions = std::move(reactions);
  return cfg;
}

std::vector<double> ImposingDistribution(std::span<const double> scores,
                                         const ImposingConfig& config) {
  std::vector<double> p = ExpMechDistribution(scores, config.beta);
  const double uniform = 1.0 / static_cast<double>(p.size());
  for (double& x : p) x = (1.0 - config.q) * x + config.q * uniform;
  return p;
}

CountScores FractionOfOnesByCount(int n) {
  return [n](int ones) {
    const double frac = static_cast<double>(ones) / n;
    return std::vector<double>{frac, 1.0 - frac};
  };
}

ImposingReport ImposingMarginCheck(const ImposingConfig& config,
                                   const CountScores& scores) {
  ImposingReport r;
  const int S = config.num_outcomes;
  r.required_margin = config.gamma / S;
  r.min_margin = kInf;
  for (const ReactionTable& table : config.reactions) {
    for (int t = 0; t < table.num_types(); ++t) {
      for (int b = 0; b < table.num_types(); ++b) {
        if (b == t) continue;
        double margin = 0.0;
        for (int s = 0; s < S; ++s) {
          margin += (table.values[t][s][table.BestReaction(t, s)] -
                     table.values[t][s][table.BestReaction(b, s)]) /
                    S;
        }
        r.min_margin = std::min(r.min_margin, margin);
      }
    }
  }
  r.margin_holds = r.min_margin >= r.required_margin - 1e-12;
  r.q_gamma_over_s = config.q * config.gamma / S;
  r.q_condition_holds = r.q_gamma_over_s >= 2.0 * config.epsilon - 1e-12;

  const int n = config.n;
  std::vector<std::vector<double>> mix(n + 1);
  r.min_support = kInf;
  for (int k = 0; k <= n; ++k) {
    const std::vector<double> sc = scores(k);
    if (static_cast<int>(sc.size()) != S) throw Error("score width mismatch");
    mix[k] = ImposingDistribution(sc, config);
    double total = 0.0;
    for (double x : mix[k]) {
      total += x;
      r.min_support = std::min(r.min_support, x);
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("mixture does not sum to one");
  }
  r.support_holds = r.min_support >= config.q / S - 1e-15;

  // An unverified agent sees n - c verified reports, c - 1 other unverified
  // ones, and her own; only the number of ones matters.
  r.min_truthful_gap = kInf;
  bool binary = true;
  for (const ReactionTable& table : config.reactions) binary = binary && table.num_types() == 2;
  if (binary) {
    for (const ReactionTable& table : config.reactions) {
      for (int t = 0; t < 2; ++t) {
        const int b = 1 - t;
        auto value = [&](int ones, int declared) {
          double u = 0.0;
          for (int s = 0; s < S; ++s) {
            u += mix[ones][s] * table.values[t][s][table.BestReaction(declared, s)];
          }
          return u;
        };
        for (int verified_ones = 0; verified_ones <= n - config.c; ++verified_ones) {
          double worst_truth = kInf, best_lie = -kInf;
          for (int others = 0; others <= config.c - 1; ++others) {
            worst_truth = std::min(worst_truth, value(verified_ones + others + t, t));
            best_lie = std::max(best_lie, value(verified_ones + others + b, b));
          }
          r.min_truthful_gap = std::min(r.min_truthful_gap, worst_truth - best_lie);
        }
      }
    }
    r.truthful_gap_positive = r.min_truthful_gap > 0.0;
  }

  const std::vector<double> top = scores(n);
  const std::vector<double> beta = ExpMechDistribution(top, config.beta);
  for (int s = 0; s < S; ++s) {
    r.expected_f_mixture += mix[n][s] * top[s];
    r.expected_f_beta += beta[s] * top[s];
  }
  r.max_f = *std::max_element(top.begin(), top.end());
  r.final_bound = r.max_f - (4.0 * config.c + 2.0) *
                                std::sqrt(config.d * S / (config.gamma * n)) *
                                std::sqrt(std::log(n * config.gamma / (2.0 * config.d)));
  r.final_bound_holds = r.expected_f_mixture >= r.final_bound - kComparisonSlack;
  return r;
}

ExpMechGame EncodeExpMechGame(const Scf& f, const ExpMechConfig& config,
                              std::vector<std::vector<std::vector<double>>> values) {
  const int n = f.n();
  if (n != config.n) throw Error("score function and config disagree on n");
  if (static_cast<int>(values.size()) != n) throw Error("need values for every agent");
  ProfileIndexer indexer(f.domain_sizes);
  indexer.Count(100'000);

  GameFormSpec spec;
  spec.num_agents = n;
  // (terminal) -> (profile, outcome)
  auto terminals = std::make_shared<std::vector<std::pair<std::vector<int>, int>>>();

  // Info set per (agent, prefix): perfect information.
  std::vector<std::vector<int>> prefixes = {{}};
  spec.nodes.push_back(Node{});
  std::vector<NodeId> ids = {0};
  for (int level = 0; level < n; ++level) {
    std::vector<std::vector<int>> next;
    std::vector<NodeId> next_ids;
    for (size_t k = 0; k < prefixes.size(); ++k) {
      const NodeId id = ids[k];
      std::string path;
      for (int v : prefixes[k]) path += std::to_string(v);
      spec.nodes[id].label = "h" + path;
      spec.nodes[id].kind = NodeKind::kPlayer;
      spec.nodes[id].owner = level;
      spec.info_sets.push_back(InfoSet{level, {id}});
      for (int t = 0; t < f.domain_sizes[level]; ++t) {
        const NodeId child = static_cast<NodeId>(spec.nodes.size());
        spec.nodes[id].edges.push_back(
            Edge{fmt::format("a{}@{}:{}", level, path, t), child, 0.0});
        spec.nodes.push_back(Node{});
        std::vector<int> extended = prefixes[k];
        extended.push_back(t);
        next.push_back(std::move(extended));
        next_ids.push_back(child);
      }
    }
    prefixes = std::move(next);
    ids = std::move(next_ids);
  }
  terminals->resize(0);
  std::vector<int> terminal_of;  // node id -> index into terminals, -1 otherwise
  for (size_t k = 0; k < prefixes.size(); ++k) {
    const NodeId id = ids[k];
    std::string path;
    for (int v : prefixes[k]) path += std::to_string(v);
    spec.nodes[id].label = "h" + path;
    spec.nodes[id].kind = NodeKind::kChance;
    spec.nodes[id].owner = kChanceOwner;
    const std::vector<double> dist = ExpMechDistribution(f.Scores(prefixes[k]), config.beta);
    for (int s = 0; s < f.num_outcomes(); ++s) {
      const NodeId child = static_cast<NodeId>(spec.nodes.size());
      spec.nodes[id].edges.push_back(Edge{f.outcomes[s], child, dist[s]});
      Node leaf;
      leaf.label = "z" + path + ":" + f.outcomes[s];
      leaf.kind = NodeKind::kTerminal;
      leaf.outcome = f.outcomes[s];
      spec.nodes.push_back(leaf);
      if (static_cast<int>(terminal_of.size()) <= child) terminal_of.resize(child + 1, -1);
      terminal_of[child] = static_cast<int>(terminals->size());
      terminals->push_back({prefixes[k], s});
    }
  }

  ExpMechGame g;
  g.game = std::make_unique<GameForm>(std::move(spec));
  g.signalling.strategies.resize(n);
  for (int a = 0; a < n; ++a) {
    const size_t sets = g.game->agent_info_sets(a).size();
    for (int t = 0; t < f.domain_sizes[a]; ++t) {
      g.signalling.strategies[a].push_back(Strategy{a, std::vector<int>(sets, t)});
    }
  }
  const int verified = n - config.c;
  auto vals = std::make_shared<const std::vector<std::vector<std::vector<double>>>>(
      std::move(values));
  auto index = std::make_shared<const std::vector<int>>(std::move(terminal_of));
  g.utility = [terminals, vals, index, verified](int agent, int type, NodeId z) {
    const auto& [profile, outcome] = (*terminals)[(*index)[z]];
    const double v = (*vals)[agent][type][outcome];
    if (agent < verified && profile[agent] != type) return 0.0;
    return v;
  };
  return g;
}

}  // namespace osplab
