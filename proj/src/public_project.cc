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
#include <numeric>
#include <sstream>

#include <fmt/core.h>

namespace osplab {

PublicProjectInstance PublicProjectInstance::Make(int n, int c, double delta) {
  if (n < 1) throw Error(fmt::format("n must be positive (got {})", n));
  if (c < 0 || c > n) {
    throw Error(fmt::format("threshold c must lie in [0, n] (got c={}, n={})", c, n));
  }
  if (delta <= 0.0) delta = 1.0 / (static_cast<double>(n) * n);
  if (!(delta * n < 1.0)) {
    throw Error(fmt::format("low value {} is too large: need delta * n < 1", delta));
  }
  return PublicProjectInstance{n, c, delta};
}

int PublicProjectFunction(std::span<const int> profile, int c) {
  const int high = static_cast<int>(std::count(profile.begin(), profile.end(), 1));
  return high >= c ? 1 : 0;
}

int PublicProjectSumForm(std::span<const int> profile, int c, double delta) {
  double sum = 0.0;
  for (int t : profile) sum += t == 1 ? 1.0 : delta;
  return sum >= c ? 1 : 0;
}

bool MustVerify(int n, int c, int n_i, int k_i, bool declared_high) {
  if (declared_high) return k_i >= c + n_i - n && k_i <= c - 1;
  return k_i >= c + n_i + 1 - n && k_i <= c - 2;
}

namespace {

class Uniform : public SelectionRule {
 public:
  std::string name() const override { return "uniform"; }
  int Next(const SelectionView& view, Rng& rng) const override {
    return view.remaining[rng.Below(view.remaining.size())];
  }
};

class FixedOrder : public SelectionRule {
 public:
  explicit FixedOrder(std::vector<int> order) : order_(std::move(order)) {}
  std::string name() const override {
    std::string s = "fixed:";
    for (size_t i = 0; i < order_.size(); ++i) {
      s += fmt::format("{}{}", i ? ";" : "", order_[i]);
    }
    return s;
  }
  int Next(const SelectionView& view, Rng&) const override {
    for (int agent : order_) {
      if (!view.revealed[agent]) return agent;
    }
    throw Error("fixed order exhausted");
  }

 private:
  std::vector<int> order_;
};

class AdaptiveExtremes : public SelectionRule {
 public:
  std::string name() const override { return "adaptive"; }
  int Next(const SelectionView& view, Rng&) const override {
    const bool after_high = !view.record.empty() && view.record.back().declared == 1;
    const int n = static_cast<int>(view.revealed.size());
    if (after_high) {
      for (int i = n - 1; i >= 0; --i) {
        if (!view.revealed[i]) return i;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        if (!view.revealed[i]) return i;
      }
    }
    throw Error("no agent left to reveal");
  }
};

}  // namespace

std::unique_ptr<SelectionRule> UniformRule() { return std::make_unique<Uniform>(); }

std::unique_ptr<SelectionRule> FixedOrderRule(std::vector<int> order) {
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != static_cast<int>(i)) {
      throw Error("fixed order must be a permutation of 0..n-1");
    }
  }
  return std::make_unique<FixedOrder>(std::move(order));
}

std::unique_ptr<SelectionRule> AdaptiveExtremesRule() {
  return std::make_unique<AdaptiveExtremes>();
}

TableRule::TableRule(std::map<Record, int> table,
                     std::unique_ptr<SelectionRule> fallback)
    : table_(std::move(table)), fallback_(std::move(fallback)) {
  if (!fallback_) throw Error("table rule needs a fallback rule");
}

int TableRule::Next(const SelectionView& view, Rng& rng) const {
  auto it = table_.find(view.record);
  if (it == table_.end()) return fallback_->Next(view, rng);
  const int agent = it->second;
  if (agent < 0 || agent >= static_cast<int>(view.revealed.size()) ||
      view.revealed[agent]) {
    throw Error(fmt::format("table rule selects agent {}, who is not available", agent));
  }
  return agent;
}

std::unique_ptr<SelectionRule> MakeRule(const std::string& text, int n) {
  if (text == "uniform") return UniformRule();
  if (text == "adaptive") return AdaptiveExtremesRule();
  if (text.rfind("fixed:", 0) == 0) {
    const std::string body = text.substr(6);
    std::vector<int> order;
    if (body == "identity") {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
    } else {
      std::stringstream in(body);
      std::string item;
      while (std::getline(in, item, ',')) {
        try {
          size_t used = 0;
          order.push_back(std::stoi(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
          throw Error(fmt::format("bad agent index '{}' in fixed order", item));
        }
      }
    }
    if (static_cast<int>(order.size()) != n) {
      throw Error(fmt::format("fixed order lists {} agents, instance has {}",
                              order.size(), n));
    }
    return FixedOrderRule(std::move(order));
  }
  throw Error(fmt::format(
      "unknown rule '{}' (expected uniform|adaptive|fixed:<order>|file:<path>)", text));
}

std::string StopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::kThresholdReached: return "threshold-reached";
    case StopReason::kInfeasible: return "infeasible";
    case StopReason::kAllRevealed: return "all-revealed";
    case StopReason::kRevelationCap: return "revelation-cap";
  }
  return "?";
}

Transcript RunSequential(const PublicProjectInstance& instance,
                         std::span<const int> profile, const SelectionRule& rule,
                         Rng& rng, int max_revelations) {
  const int n = instance.n;
  const int c = instance.c;
  if (static_cast<int>(profile.size()) != n) {
    throw Error(fmt::format("profile has {} agents, instance has {}", profile.size(), n));
  }
  Transcript tr;
  tr.record.reserve(n);
  std::vector<int> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> position(n);
  std::iota(position.begin(), position.end(), 0);
  std::vector<char> revealed(n, 0);
  int high = 0;
  for (;;) {
    const int shown = static_cast<int>(tr.record.size());
    if (high >= c) {
      tr.stop = StopReason::kThresholdReached;
      tr.outcome = 1;
      break;
    }
    if (n - shown < c - high) {
      tr.stop = StopReason::kInfeasible;
      tr.outcome = 0;
      break;
    }
    if (shown == n) {
      tr.stop = StopReason::kAllRevealed;
      tr.outcome = PublicProjectFunction(profile, c);
      break;
    }
    if (max_revelations > 0 && shown >= max_revelations) {
      tr.stop = StopReason::kRevelationCap;
      tr.outcome = 0;
      break;
    }
    const SelectionView view{tr.record, std::span<const int>(remaining.data(), n - shown),
                             revealed};
    const int agent = rule.Next(view, rng);
    if (agent < 0 || agent >= n || revealed[agent]) {
      throw Error(fmt::format("rule '{}' returned unavailable agent {}", rule.name(),
                              agent));
    }
    const int declared = profile[agent];
    if (MustVerify(n, c, shown, high, declared == 1)) tr.verified.push_back(agent);
    tr.record.push_back({agent, declared});
    revealed[agent] = 1;
    high += declared;
    // Swap-remove from the unrevealed prefix.
    const int last = remaining[n - shown - 1];
    const int at = position[agent];
    remaining[at] = last;
    position[last] = at;
    remaining[n - shown - 1] = agent;
    position[agent] = n - shown - 1;
  }
  tr.tau = static_cast<int>(tr.verified.size());
  return tr;
}

double ProbTauBelow(int n, int c) {
  if (n - c - 2 < c - 1 || c < 1) return 0.0;
  return std::exp(LogBinomial(n - c - 2, c - 1) - LogBinomial(n, c));
}

double ProbTauBelowExact(int n, int c) {
  if (c == 0) return n >= 2 ? 1.0 : 0.0;
  const int draws = n - c - 3;
  if (c < 1 || draws < 0) return 0.0;
  double total = 0.0;
  const double denom = LogBinomial(n, draws);
  for (int j = std::max(0, c - 1); j <= std::min(c, draws); ++j) {
    total += std::exp(LogBinomial(c, j) + LogBinomial(n - c, draws - j) - denom);
  }
  return std::min(1.0, total);
}

std::vector<int> ExactlyCHighProfile(int n, int c, Rng& rng) {
  std::vector<int> profile(n, 0);
  std::fill(profile.begin(), profile.begin() + c, 1);
  rng.Shuffle(std::span<int>(profile));
  return profile;
}

namespace {

// tau of trial t for each t, computed on stream MixSeed(seed, stream(t)).
template <typename Profile>
std::vector<double> RunTrials(const PublicProjectInstance& instance,
                              const SelectionRule& rule, uint64_t trials,
                              uint64_t seed, unsigned threads, uint64_t stride,
                              uint64_t offset, Profile draw_profile,
                              int max_revelations = 0,
                              std::vector<double>* errors = nullptr) {
  std::vector<double> tau(trials);
  if (errors) errors->assign(trials, 0.0);
  ParallelFor(trials, threads, [&](size_t t) {
    Rng rng(MixSeed(seed, t * stride + offset));
    const std::vector<int> profile = draw_profile(rng);
    const Transcript tr = RunSequential(instance, profile, rule, rng, max_revelations);
    tau[t] = tr.tau;
    if (errors) {
      (*errors)[t] = tr.outcome != PublicProjectFunction(profile, instance.c) ? 1.0 : 0.0;
    }
  });
  return tau;
}

}  // namespace

TauStatistics RunTauStatistics(int n, int c, const SelectionRule& rule,
                               uint64_t trials, uint64_t seed, unsigned threads) {
  if (trials < 1) throw Error("trials must be at least 1");
  const PublicProjectInstance instance = PublicProjectInstance::Make(n, c);
  const std::vector<double> tau =
      RunTrials(instance, rule, trials, seed, threads, 1, 0,
                [n, c](Rng& rng) { return ExactlyCHighProfile(n, c, rng); });
  TauStatistics s;
  s.n = n;
  s.c = c;
  s.rule = rule.name();
  s.tau = Summarize(tau);
  s.histogram.assign(n + 1, 0);
  uint64_t below = 0;
  for (double x : tau) {
    ++s.histogram[static_cast<size_t>(x)];
    if (x < n - c - 1) ++below;
  }
  s.prob_below_mc = static_cast<double>(below) / static_cast<double>(trials);
  s.prob_below_closed_form = ProbTauBelow(n, c);
  s.prob_below_exact = ProbTauBelowExact(n, c);
  s.bound_closed_form = (n - c - 1) * (1.0 - s.prob_below_closed_form);
  s.bound_exact = (n - c - 1) * (1.0 - s.prob_below_exact);
  return s;
}

RuleComparison CompareRules(int n, int c, const SelectionRule& rule,
                            uint64_t trials, uint64_t seed, unsigned threads) {
  if (trials < 2) throw Error("comparison needs at least 2 trials");
  const PublicProjectInstance instance = PublicProjectInstance::Make(n, c);
  auto draw = [n, c](Rng& rng) { return ExactlyCHighProfile(n, c, rng); };
  const auto uniform = UniformRule();
  const std::vector<double> a = RunTrials(instance, rule, trials, seed, threads, 2, 0, draw);
  const std::vector<double> b =
      RunTrials(instance, *uniform, trials, seed, threads, 2, 1, draw);
  RuleComparison r;
  r.rule = Summarize(a);
  r.uniform = Summarize(b);
  r.difference = r.rule.mean - r.uniform.mean;
  r.standard_error = std::hypot(r.rule.standard_error, r.uniform.standard_error);
  r.ci_lo = r.difference - 1.959963984540054 * r.standard_error;
  r.ci_hi = r.difference + 1.959963984540054 * r.standard_error;
  r.within_three_se = std::abs(r.difference) <= 3.0 * r.standard_error;
  return r;
}

SampleSummary BayesExperimentWithPrior(int n, int c, double p, uint64_t trials,
                                       uint64_t seed, unsigned threads) {
  if (trials < 1) throw Error("trials must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("prior probability must lie in [0, 1]");
  const PublicProjectInstance instance = PublicProjectInstance::Make(n, c);
  const auto uniform = UniformRule();
  const std::vector<double> tau =
      RunTrials(instance, *uniform, trials, seed, threads, 1, 0, [n, p](Rng& rng) {
        std::vector<int> profile(n);
        for (int& t : profile) t = rng.Bernoulli(p) ? 1 : 0;
        return profile;
      });
  return Summarize(tau);
}

BayesResult BayesExperiment(int n, int c, double g, uint64_t trials, uint64_t seed,
                            unsigned threads) {
  if (!(g > 0.0)) throw Error("g must be positive");
  if (c >= n) throw Error("the prior experiment needs c < n");
  const double m = n - c - 1;
  BayesResult r;
  r.p = g / (g + m * m);
  r.tau = BayesExperimentWithPrior(n, c, r.p, trials, seed, threads);
  r.bound = (c - 1) + (n - 2.0 * c) * (1.0 - g / m);
  r.holds = r.tau.mean >= r.bound - (r.tau.ci_hi - r.tau.mean);
  return r;
}

EarlyStopResult EarlyStopExperiment(int n, int c, uint64_t trials, uint64_t seed,
                                    unsigned threads) {
  if (trials < 1) throw Error("trials must be at least 1");
  const int cutoff = n - c - 1;
  if (cutoff < 1) throw Error("early stop needs n - c - 1 >= 1");
  const PublicProjectInstance instance = PublicProjectInstance::Make(n, c);
  const auto uniform = UniformRule();
  std::vector<double> errors;
  RunTrials(instance, *uniform, trials, seed, threads, 1, 0,
            [n, c](Rng& rng) { return ExactlyCHighProfile(n, c, rng); }, cutoff,
            &errors);
  EarlyStopResult r;
  r.error_mc = Summarize(errors).mean;
  r.error_exact =
      cutoff < c ? 1.0 : 1.0 - std::exp(LogBinomial(cutoff, c) - LogBinomial(n, c));
  return r;
}

}  // namespace osplab
