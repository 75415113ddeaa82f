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

#include "osplab/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "osplab/common.h"
#include "osplab/direct_mechanisms.h"
#include "osplab/dominance.h"
#include "osplab/exponential.h"
#include "osplab/fixtures.h"
#include "osplab/json_io.h"
#include "osplab/public_project.h"
#include "osplab/verification.h"

namespace osplab {
namespace {

std::string Num(double x) { return fmt::format("{}", x); }
std::string Bool(bool b) { return b ? "true" : "false"; }

bool LooksNumeric(const std::string& s, double& value) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

// Where the table goes and where the human-readable report goes.
struct Sink {
  const ExperimentConfig& config;
  std::ostream& out;
  std::ostream& err;

  std::ostream& report() { return config.out.empty() ? err : out; }

  void Emit(const Table& table) {
    const std::string text = config.json ? ToJson(table) : ToCsv(table);
    if (config.out.empty()) {
      out << text;
      return;
    }
    std::ofstream file(config.out, std::ios::binary);
    if (!file) throw Error(fmt::format("{}: cannot open for writing", config.out));
    file << text;
    if (!file) throw Error(fmt::format("{}: write failed", config.out));
  }
};

void WriteCsvFile(const std::string& path, const Table& table) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(fmt::format("{}: cannot open for writing", path));
  file << ToCsv(table);
  if (!file) throw Error(fmt::format("{}: write failed", path));
}

std::string JoinLabels(const std::vector<std::string>& labels) {
  std::string s;
  for (size_t k = 0; k < labels.size(); ++k) s += (k ? " " : "") + labels[k];
  return s;
}

std::string DescribeWitness(const GameForm& game, const Witness& w) {
  std::string s;
  for (const Strategy& o : w.opponents) {
    s += fmt::format("agent {}: [{}] ", o.agent, JoinLabels(StrategyLabels(game, o)));
  }
  if (!game.has_chance()) {
    s.pop_back();
  } else if (w.chance.choice.empty()) {
    s += fmt::format("(mass {})", w.chance.probability);
  } else {
    std::vector<std::string> moves;
    for (size_t k = 0; k < w.chance.choice.size(); ++k) {
      moves.push_back(game.node(game.chance_nodes()[k]).edges[w.chance.choice[k]].action);
    }
    s += fmt::format("chance: [{}]", JoinLabels(moves));
  }
  return s;
}

int RunCheck(const ExperimentConfig& cfg, Sink& sink) {
  if (cfg.mechanism.empty() || cfg.valuations.empty() || cfg.signalling.empty()) {
    throw Error("check needs --mechanism, --valuations and --signalling");
  }
  const Notion notion = ParseNotion(cfg.notion);
  const GameForm game = LoadFile<GameForm>(
      cfg.mechanism, [](const Json& j) { return GameForm(GameFormSpecFromJson(j)); });
  const ValuationTable valuations =
      LoadFile<ValuationTable>(cfg.valuations, ValuationsFromJson);
  if (valuations.num_agents() != game.num_agents()) {
    throw Error(fmt::format("{}: {} agents, mechanism has {}", cfg.valuations,
                            valuations.num_agents(), game.num_agents()));
  }
  const SignallingMap signalling = LoadFile<SignallingMap>(
      cfg.signalling,
      [&](const Json& j) { return SignallingFromJson(j, game, valuations); });
  const StrategySpace space(game);
  const UtilityModel utility = UtilityFromValuations(game, valuations);
  const MechanismVerdict verdict =
      CheckMechanism(space, signalling, utility, cfg.epsilon, notion, cfg.threads);

  Table table;
  table.header = {"agent", "type", "notion", "epsilon", "holds", "gap"};
  for (const CellVerdict& cell : verdict.cells) {
    table.rows.push_back({std::to_string(cell.agent), valuations.types(cell.agent)[cell.type],
                          NotionName(notion), Num(cfg.epsilon), Bool(cell.verdict.holds),
                          Num(cell.verdict.gap)});
  }
  sink.Emit(table);

  std::ostream& r = sink.report();
  r << fmt::format("{}-{}: {}\n", cfg.epsilon, NotionName(notion),
                   verdict.holds ? "holds" : "fails");
  if (notion == Notion::kOSP || notion == Notion::kOSPExpectation) {
    r << fmt::format("implies weak dominance: {}\n", Bool(verdict.implies_sp));
  }
  if (cfg.counterexamples) {
    for (const CellVerdict& cell : verdict.cells) {
      if (!cell.verdict.counterexample) continue;
      const Counterexample& ce = *cell.verdict.counterexample;
      r << fmt::format("agent {} type {}: deviation [{}]", cell.agent,
                       valuations.types(cell.agent)[cell.type],
                       JoinLabels(StrategyLabels(game, ce.deviation)));
      if (ce.info_set >= 0) r << fmt::format(" at information set {}", ce.info_set);
      r << fmt::format(", gap {}\n", cell.verdict.gap);
      r << fmt::format("  intended {} with {}\n", ce.lhs_value, DescribeWitness(game, ce.lhs));
      r << fmt::format("  deviation {} with {}\n", ce.rhs_value, DescribeWitness(game, ce.rhs));
    }
  }
  return verdict.holds ? kExitOk : kExitFailure;
}

// Fine-only and probability-only files reuse the scheme format with the
// other half filled in.
VerificationScheme LoadPartialScheme(const std::string& path, const ValuationTable& vals,
                                     bool fines_only) {
  return LoadFile<VerificationScheme>(path, [&](const Json& j) {
    Json full = j;
    const int n = vals.num_agents();
    if (fines_only && !full.contains("agents")) {
      full["agents"] = Json::array();
      for (int a = 0; a < n; ++a) full["agents"].push_back(Json{{"p_kind", "constant"}, {"p", 0.0}});
    }
    if (!fines_only && !full.contains("fines")) {
      full["fines"] = Json::array();
      for (int a = 0; a < n; ++a) full["fines"].push_back(Json{{"kind", "constant"}, {"F", 0.0}});
    }
    return SchemeFromJson(full, vals);
  });
}

int RunDirect(const ExperimentConfig& cfg, Sink& sink) {
  if (cfg.n < 1) throw Error("--n must be positive");
  ValuationTable vals = cfg.valuations.empty()
                            ? MatchingValuations(cfg.n)
                            : LoadFile<ValuationTable>(cfg.valuations, ValuationsFromJson);
  const int n = vals.num_agents();
  if (!cfg.choice.empty() && cfg.choice != "majority") {
    throw Error(fmt::format("unknown choice '{}' (expected majority)", cfg.choice));
  }
  if (vals.num_outcomes() < 2) throw Error("majority choice needs at least two outcomes");
  SocialChoice f = MajorityChoice(n);
  const Construction construction = ParseConstruction(cfg.construction);

  DirectMechanism mech;
  switch (construction) {
    case Construction::kFixedFines: {
      std::vector<FineSchedule> fines;
      if (cfg.fines.empty()) {
        fines.assign(n, ConstantFine(2.0));
      } else {
        const VerificationScheme s = LoadPartialScheme(cfg.fines, vals, true);
        for (int a = 0; a < n; ++a) {
          if (!s.verifiable(a)) throw Error(fmt::format("{}: agent {} must be verifiable", cfg.fines, a));
          const SchemeExtrema e = s.Extrema(a, vals.domain_sizes(), f);
          fines.push_back({s.agent(a).fine, e.fine_min, e.fine_max});
        }
      }
      mech = BuildFixedFines(f, vals, std::move(fines));
      break;
    }
    case Construction::kTheorem1:
      mech = BuildTheorem1(f, vals, cfg.gamma);
      break;
    case Construction::kFixedProbabilities:
    case Construction::kRevealing: {
      std::vector<SchemeFn> probs;
      if (cfg.probs.empty()) {
        probs.assign(n, [](const LieContext&) { return 0.5; });
      } else {
        const VerificationScheme s = LoadPartialScheme(cfg.probs, vals, false);
        for (int a = 0; a < n; ++a) {
          if (!s.verifiable(a)) throw Error(fmt::format("{}: agent {} must be verifiable", cfg.probs, a));
          probs.push_back(s.agent(a).probability);
        }
      }
      RevealingFn revealing =
          construction == Construction::kRevealing ? ValueConsistentRevealing(vals) : nullptr;
      mech = BuildFixedProbabilities(f, vals, std::move(probs), revealing);
      break;
    }
  }

  const DirectSummary summary = Summarize(mech);
  sink.report() << fmt::format("{} with {} agents: fines in [{}, {}], expected verified {}\n",
                               summary.construction, summary.n, summary.f_min, summary.f_max,
                               summary.expected_verified);
  std::string mc_mean, mc_se;
  if (cfg.trials > 0) {
    const std::vector<int> truth(n, 0);
    const int outcome = f(truth);
    std::vector<double> counts(cfg.trials);
    ParallelFor(cfg.trials, cfg.threads, [&](size_t t) {
      counts[t] = static_cast<double>(
          SampleVerification(mech.scheme, truth, truth, outcome, MixSeed(cfg.seed, t))
              .inspected.size());
    });
    const SampleSummary s = Summarize(counts);
    mc_mean = Num(s.mean);
    mc_se = Num(s.standard_error);
    sink.report() << fmt::format("verified per run: {} (se {}), expected {}\n", s.mean,
                                 s.standard_error, summary.expected_verified);
  }

  std::string osp;
  bool ok = true;
  if (cfg.cross_check) {
    const DirectGame dg = AsGameForm(mech);
    const StrategySpace space(*dg.game);
    const MechanismVerdict v =
        CheckMechanism(space, dg.signalling, dg.utility, 0.0, Notion::kOSP, cfg.threads);
    osp = Bool(v.holds);
    ok = v.holds;
    double worst = -INFINITY;
    for (const CellVerdict& cell : v.cells) worst = std::max(worst, cell.verdict.gap);
    sink.report() << fmt::format("truthful reporting obviously dominant: {} (max gap {})\n",
                                 osp, worst);
  }

  if (!cfg.emit_curve.empty()) {
    Table curve;
    curve.header = {"F", "p"};
    for (const CurvePoint& pt : ProbabilityCurve(vals.t_sup() - vals.t_inf())) {
      curve.rows.push_back({Num(pt.fine), Num(pt.p)});
    }
    WriteCsvFile(cfg.emit_curve, curve);
  }
  if (!cfg.emit_surface.empty()) {
    Table surface;
    surface.header = {"gap", "p_max", "F"};
    for (const SurfacePoint& pt : FineSurface()) {
      surface.rows.push_back({Num(pt.gap), Num(pt.p_max), Num(pt.fine)});
    }
    WriteCsvFile(cfg.emit_surface, surface);
  }

  Table table;
  table.header = {"construction", "n", "gamma", "t_inf", "t_sup", "f_min", "f_max",
                  "p", "expected_verified", "mc_mean", "mc_se", "osp"};
  table.rows.push_back({summary.construction, std::to_string(summary.n),
                        construction == Construction::kTheorem1 ? Num(summary.gamma) : "",
                        Num(summary.t_inf), Num(summary.t_sup), Num(summary.f_min),
                        Num(summary.f_max), Num(summary.p), Num(summary.expected_verified),
                        mc_mean, mc_se, osp});
  sink.Emit(table);
  return ok ? kExitOk : kExitFailure;
}

int RunPubproj(const ExperimentConfig& cfg, Sink& sink) {
  int c = cfg.c;
  if (!cfg.c_rule.empty()) {
    if (cfg.c_rule != "sqrt") throw Error(fmt::format("unknown c rule '{}' (expected sqrt)", cfg.c_rule));
    if (cfg.n < 1) throw Error("--n must be positive");
    c = 1 + static_cast<int>(std::floor(std::sqrt(static_cast<double>(cfg.n - 1)) + 1e-12));
  }
  if (c < 0) throw Error("pubproj needs --c or --c-rule");
  const PublicProjectInstance instance = PublicProjectInstance::Make(cfg.n, c, cfg.delta);
  const uint64_t trials = cfg.trials > 0 ? cfg.trials : 10000;

  std::unique_ptr<SelectionRule> rule;
  if (cfg.rule.rfind("file:", 0) == 0) {
    const std::string path = cfg.rule.substr(5);
    rule = LoadFile<std::unique_ptr<SelectionRule>>(
        path, [&](const Json& j) { return RuleFromJson(j, cfg.n); });
  } else {
    rule = MakeRule(cfg.rule, cfg.n);
  }

  Table table;
  table.header = {"n", "c", "rule", "trials", "mean_tau", "ci_lo", "ci_hi",
                  "prob_tau_below_exact", "prob_tau_below_mc", "prob_tau_below_hypergeometric"};
  std::ostream& r = sink.report();
  r << fmt::format("n = {}, c = {}, delta = {}\n", instance.n, instance.c, instance.delta);
  bool ok = true;
  if (cfg.bayes_g > 0.0) {
    const BayesResult b = BayesExperiment(cfg.n, c, cfg.bayes_g, trials, cfg.seed, cfg.threads);
    table.rows.push_back({std::to_string(cfg.n), std::to_string(c),
                          fmt::format("bayes:g={}", cfg.bayes_g), std::to_string(trials),
                          Num(b.tau.mean), Num(b.tau.ci_lo), Num(b.tau.ci_hi), "", "", ""});
    r << fmt::format("high-type prior {}: mean verified {} against bound {}: {}\n", b.p,
                     b.tau.mean, b.bound, b.holds ? "holds" : "fails");
    ok = b.holds;
  } else {
    const TauStatistics s = RunTauStatistics(cfg.n, c, *rule, trials, cfg.seed, cfg.threads);
    table.rows.push_back({std::to_string(cfg.n), std::to_string(c), cfg.rule,
                          std::to_string(trials), Num(s.tau.mean), Num(s.tau.ci_lo),
                          Num(s.tau.ci_hi), Num(s.prob_below_closed_form), Num(s.prob_below_mc),
                          Num(s.prob_below_exact)});
    r << fmt::format("mean verified {} ({} per agent)\n", s.tau.mean, s.tau.mean / cfg.n);
    r << fmt::format("P(tau < n-c-1): closed form {}, hypergeometric {}, sampled {}\n",
                     s.prob_below_closed_form, s.prob_below_exact, s.prob_below_mc);
    r << fmt::format("lower bound on E[tau]: {} (closed form), {} (hypergeometric)\n",
                     s.bound_closed_form, s.bound_exact);
    if (cfg.compare) {
      const RuleComparison cmp = CompareRules(cfg.n, c, *rule, trials, cfg.seed, cfg.threads);
      r << fmt::format("{} minus uniform: {} (se {}): {}\n", rule->name(), cmp.difference,
                       cmp.standard_error,
                       cmp.within_three_se ? "within 3 se" : "outside 3 se");
      ok = cmp.within_three_se;
    }
  }
  sink.Emit(table);
  return ok ? kExitOk : kExitFailure;
}

int RunExpmech(const ExperimentConfig& cfg, Sink& sink) {
  if (cfg.n < 1) throw Error("--n must be positive");
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : 1.0;
  Scf f = cfg.f_table.empty() ? FractionOfOnes(cfg.n) : LoadFile<Scf>(cfg.f_table, ScfFromJson);
  const int n = f.n();
  if (!cfg.f_table.empty() && n != cfg.n) {
    throw Error(fmt::format("{}: domain has {} agents, --n is {}", cfg.f_table, n, cfg.n));
  }
  const int c = cfg.c >= 0 ? cfg.c
                           : std::max(1, static_cast<int>(std::floor(std::pow(n, 0.25) + 1e-12)));
  int d = 1;
  if (cfg.d == "auto") {
    if (!cfg.f_table.empty()) d = Sensitivity(f);
  } else {
    size_t used = 0;
    try {
      d = std::stoi(cfg.d, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cfg.d.size()) throw Error(fmt::format("bad --d '{}'", cfg.d));
  }
  std::ostream& r = sink.report();
  Table table;
  table.header = {"n", "c", "epsilon", "beta", "max_ratio", "ratio_bound", "expected_f",
                  "max_f", "approx_bound", "q", "gamma", "n0"};
  std::vector<int> top(n);
  for (int a = 0; a < n; ++a) top[a] = f.domain_sizes[a] - 1;

  if (cfg.imposing) {
    if (cfg.reactions.empty()) throw Error("--imposing needs --reactions");
    if (!cfg.f_table.empty()) throw Error("--imposing uses the fraction-of-ones score; drop --f");
    std::vector<ReactionTable> reactions =
        LoadFile<std::vector<ReactionTable>>(cfg.reactions, ReactionsFromJson);
    const ImposingConfig ic = BuildImposing(d, std::move(reactions), n, c);
    const ImposingReport rep = ImposingMarginCheck(ic, FractionOfOnesByCount(n));
    r << fmt::format("epsilon {}, q {}, beta {}, gamma {}, n0 {}\n", ic.epsilon, ic.q, ic.beta,
                     ic.gamma, ic.n0);
    r << fmt::format("margin {} vs gamma/|S| {}: {}\n", rep.min_margin, rep.required_margin,
                     Bool(rep.margin_holds));
    r << fmt::format("q gamma/|S| {} vs 2 epsilon {}: {}\n", rep.q_gamma_over_s,
                     2 * ic.epsilon, Bool(rep.q_condition_holds));
    r << fmt::format("min probability {} vs q/|S| {}: {}\n", rep.min_support,
                     ic.q / ic.num_outcomes, Bool(rep.support_holds));
    r << fmt::format("E[f] mixture {}, pure {}; final bound {}: {}\n", rep.expected_f_mixture,
                     rep.expected_f_beta, rep.final_bound, Bool(rep.final_bound_holds));
    table.rows.push_back({std::to_string(n), std::to_string(c), Num(ic.epsilon), Num(ic.beta),
                          "", "", Num(rep.expected_f_mixture), Num(rep.max_f),
                          Num(rep.max_f - rep.final_bound), Num(ic.q), Num(ic.gamma),
                          std::to_string(ic.n0)});
    sink.Emit(table);
    const bool ok = rep.margin_holds && rep.q_condition_holds && rep.support_holds &&
                    rep.final_bound_holds;
    return ok ? kExitOk : kExitFailure;
  }

  const ExpMechConfig ec = ExpMechConfig::Make(n, c, d, eps);
  bool ok = true;
  std::string max_ratio, ratio_bound = Num(std::exp(eps));
  try {
    const OspGapReport g = OspGapCheck(f, ec, cfg.threads);
    max_ratio = Num(g.max_ratio);
    ok = g.ratio_holds && g.utility_holds;
    r << fmt::format("max ratio {} vs {}: {}; utility difference {}: {}\n", g.max_ratio,
                     g.ratio_bound, Bool(g.ratio_holds), g.max_utility_difference,
                     Bool(g.utility_holds));
  } catch (const Error& e) {
    r << fmt::format("ratio check skipped: {}\n", e.what());
  }
  const std::vector<double> scores = f.Scores(top);
  const ApproxReport a = ApproxError(scores, ec.beta);
  ok = ok && a.holds;
  r << fmt::format("beta {}: E[f] {} of max {}, error {}{}\n", ec.beta, a.expected_f, a.max_f,
                   a.error,
                   a.bound_applies ? fmt::format(" vs bound {}", a.bound) : std::string());
  if (cfg.trials > 0) {
    std::vector<double> values(cfg.trials);
    ParallelFor(cfg.trials, cfg.threads, [&](size_t t) {
      values[t] = scores[RunExpMech(top, ec, f, MixSeed(cfg.seed, t), cfg.shuffle).outcome];
    });
    const SampleSummary s = Summarize(values);
    r << fmt::format("sampled E[f] {} (se {})\n", s.mean, s.standard_error);
  }
  const double bound = ApproxErrorBound(n, c, d, eps, f.num_outcomes());
  table.rows.push_back({std::to_string(n), std::to_string(c), Num(eps), Num(ec.beta), max_ratio,
                        ratio_bound, Num(a.expected_f), Num(a.max_f), Num(bound), "", "", ""});
  sink.Emit(table);
  return ok ? kExitOk : kExitFailure;
}

int RunFixtures(const ExperimentConfig& cfg, Sink& sink) {
  for (const std::string& path : EmitFixtures(cfg.dir)) sink.out << path << "\n";
  return kExitOk;
}

}  // namespace

std::string ToCsv(const Table& table) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (size_t k = 0; k < cells.size(); ++k) s += (k ? "," : "") + field(cells[k]);
    return s + "\r\n";
  };
  std::string out = line(table.header);
  for (const auto& row : table.rows) out += line(row);
  return out;
}

std::string ToJson(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json obj = Json::object();
    for (size_t k = 0; k < table.header.size(); ++k) {
      const std::string& cell = k < row.size() ? row[k] : std::string();
      double value = 0.0;
      if (cell.empty()) {
        obj[table.header[k]] = nullptr;
      } else if (cell == "true" || cell == "false") {
        obj[table.header[k]] = cell == "true";
      } else if (LooksNumeric(cell, value)) {
        obj[table.header[k]] = value;
      } else {
        obj[table.header[k]] = cell;
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

int Run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  Sink sink{config, out, err};
  try {
    if (config.subcommand == "check") return RunCheck(config, sink);
    if (config.subcommand == "direct") return RunDirect(config, sink);
    if (config.subcommand == "pubproj") return RunPubproj(config, sink);
    if (config.subcommand == "expmech") return RunExpmech(config, sink);
    if (config.subcommand == "fixtures") return RunFixtures(config, sink);
    err << fmt::format("osplab: unknown subcommand '{}'\n", config.subcommand);
    return kExitUsage;
  } catch (const Error& e) {
    err << "osplab: " << e.what() << "\n";
    return kExitUsage;
  }
}

int Main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  CLI::App app{"Mechanisms with probabilistic verification: checkers and experiments"};
  app.require_subcommand(1);
  uint64_t seed = 0;
  std::vector<CLI::Option*> seed_options;

  auto common = [&](CLI::App* sub, bool random) {
    sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "Write the table to this path");
    sub->add_flag("--json", cfg.json, "JSON rows instead of CSV");
    if (random) {
      seed_options.push_back(
          sub->add_option("--seed", seed, "Master seed (fallback: OSPLAB_SEED, then 1)"));
      sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
    }
  };

  CLI::App* check = app.add_subcommand("check", "Check a mechanism file for (obvious) dominance");
  check->add_option("--mechanism", cfg.mechanism, "Game-form file")->required();
  check->add_option("--valuations", cfg.valuations, "Valuation file")->required();
  check->add_option("--signalling", cfg.signalling, "Signalling file")->required();
  check->add_option("--notion", cfg.notion, "sp|osp|sp-exp|osp-exp");
  check->add_option("--epsilon", cfg.epsilon, "Additive slack");
  check->add_flag("--counterexamples", cfg.counterexamples, "Print failing witnesses");
  common(check, false);

  CLI::App* direct = app.add_subcommand("direct", "Direct-revelation mechanisms with verification");
  direct->add_option("--construction", cfg.construction, "mf|t1|mp|mp-rev");
  direct->add_option("--gamma", cfg.gamma, "Scaling for t1");
  direct->add_option("--n", cfg.n, "Agents in the default instance");
  direct->add_option("--valuations", cfg.valuations, "Valuation file");
  direct->add_option("--choice", cfg.choice, "Social choice (majority)");
  direct->add_option("--fines", cfg.fines, "Fine file for mf");
  direct->add_option("--probs", cfg.probs, "Probability file for mp and mp-rev");
  direct->add_option("--emit-curve", cfg.emit_curve, "CSV of p against F");
  direct->add_option("--emit-surface", cfg.emit_surface, "CSV of F against gap and p");
  direct->add_flag("--cross-check", cfg.cross_check, "Check the game form exhaustively");
  common(direct, true);

  CLI::App* pubproj = app.add_subcommand("pubproj", "Sequential public-project mechanism");
  pubproj->add_option("--n", cfg.n, "Agents")->required();
  pubproj->add_option("--c", cfg.c, "Threshold");
  pubproj->add_option("--c-rule", cfg.c_rule, "sqrt: 1 + floor(sqrt(n - 1))");
  pubproj->add_option("--delta", cfg.delta, "Low type (default 1/n^2)");
  pubproj->add_option("--rule", cfg.rule, "uniform|adaptive|fixed:<order>|file:<path>");
  pubproj->add_option("--bayes-g", cfg.bayes_g, "Run the Bayesian prior experiment");
  pubproj->add_flag("--compare", cfg.compare, "Compare the rule with uniform");
  common(pubproj, true);

  CLI::App* expmech = app.add_subcommand("expmech", "Exponential mechanism with partial verification");
  expmech->add_option("--n", cfg.n, "Agents")->required();
  expmech->add_option("--c", cfg.c, "Unverified agents (default max(1, floor(n^(1/4))))");
  expmech->add_option("--epsilon", cfg.epsilon, "Privacy parameter (default 1)");
  expmech->add_option("--f", cfg.f_table, "Score table file");
  expmech->add_option("--d", cfg.d, "auto|<int> sensitivity");
  expmech->add_flag("--imposing", cfg.imposing, "Imposing mixture");
  expmech->add_option("--reactions", cfg.reactions, "Reaction file");
  expmech->add_flag("--shuffle", cfg.shuffle, "Random revelation order");
  common(expmech, true);

  CLI::App* fixtures = app.add_subcommand("fixtures", "Write the bundled fixture files");
  fixtures->add_option("--dir", cfg.dir, "Target directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  if (cfg.rule.empty()) cfg.rule = "uniform";

  bool seeded = false;
  for (CLI::Option* opt : seed_options) seeded = seeded || opt->count() > 0;
  if (seeded) {
    cfg.seed = seed;
  } else if (const char* env = std::getenv("OSPLAB_SEED"); env && *env) {
    const std::string text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cfg.seed);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      err << fmt::format("osplab: OSPLAB_SEED '{}' is not an unsigned integer\n", text);
      return kExitUsage;
    }
  }
  return Run(cfg, out, err);
}

}  // namespace osplab
