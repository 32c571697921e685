// Copyright 2026 The MonoContract Authors
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

/// \file
/// Experiment runners, run records and the record verifier.
///
/// Every runner produces per-round rows first; summaries are computed from
/// the rows alone (plus the configuration), so `verify_record` can recompute
/// them from a stored record.

#pragma once

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "monocontract/appendix_b.hpp"
#include "monocontract/contracting/game.hpp"
#include "monocontract/desk.hpp"
#include "monocontract/io/config.hpp"
#include "monocontract/learner_spec.hpp"
#include "monocontract/monotone.hpp"
#include "monocontract/regret.hpp"

namespace monocontract::experiments {

using io::ExperimentConfig;
using io::Json;

inline constexpr const char* kRecordFormat = "monocontract-record/1";
inline constexpr double kVerifyTol = 1e-9;

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitCheckFailed = 2, kExitNumerical = 3 };

struct RunOutput {
  Json record;
  /// (file name, contents) pairs, relative to the output directory.
  std::vector<std::pair<std::string, std::string>> files;
  int status = kExitOk;
  std::vector<std::string> failures;
};

// Formatting ----------------------------------------------------------------

/// 8 significant digits, as used in CSV output.
inline std::string fmt8(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8g", x);
  return buf;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

inline std::string rows_digest(const Json& rows) { return hex64(monocontract::detail::fnv1a(rows.dump())); }

inline constexpr const char* kCsvHeader =
    "round,arm,explore_flag,loss_or_return,payment,tab,cumulative_regret_external,cumulative_regret_swap\n";

/// One CSV line; arm is written as "none" for the outside option.
inline std::string csv_line(std::size_t round, const std::string& arm, bool explored, double value, double payment,
                            double tab, double ext, double swap) {
  return std::to_string(round) + "," + arm + "," + (explored ? "1" : "0") + "," + fmt8(value) + "," + fmt8(payment) +
         "," + fmt8(tab) + "," + fmt8(ext) + "," + fmt8(swap) + "\n";
}

inline std::string csv_preamble(const std::string& hash, std::uint64_t seed) {
  return "# config_hash " + hash + " seed " + std::to_string(seed) + "\n" + kCsvHeader;
}

// Loss suites ---------------------------------------------------------------

/// Loss sequences on {0, 1} or [0, 1] used by regret-bench.
///   iid:         arm j has Bernoulli(mu_j) losses, mu_j uniform on [0.2, 0.8].
///   switching:   four phases; in phase p arm p mod k has mean 0.3, others 0.6.
///   adversarial: adaptive; the arm played most often in the last 50 rounds
///                gets loss 1, every other arm a uniform loss on [0, 0.5].
class LossSuite {
 public:
  LossSuite(std::string kind, std::size_t k, std::size_t horizon, std::uint64_t seed)
      : kind_(std::move(kind)), k_(k), horizon_(horizon), rng_(seed, streams::kData), means_(k) {
    for (auto& m : means_) m = 0.2 + 0.6 * rng_.uniform01();
  }

  std::vector<double> next(std::size_t t, const std::vector<std::size_t>& plays) {
    std::vector<double> l(k_);
    if (kind_ == "iid") {
      for (std::size_t j = 0; j < k_; ++j) l[j] = rng_.uniform01() < means_[j] ? 1.0 : 0.0;
    } else if (kind_ == "switching") {
      const std::size_t best = (t * 4 / horizon_) % k_;
      for (std::size_t j = 0; j < k_; ++j) l[j] = rng_.uniform01() < (j == best ? 0.3 : 0.6) ? 1.0 : 0.0;
    } else {
      std::vector<std::size_t> counts(k_, 0);
      for (std::size_t s = plays.size() > 50 ? plays.size() - 50 : 0; s < plays.size(); ++s) ++counts[plays[s]];
      const auto target = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      for (std::size_t j = 0; j < k_; ++j) l[j] = j == target ? 1.0 : 0.5 * rng_.uniform01();
    }
    return l;
  }

 private:
  std::string kind_;
  std::size_t k_, horizon_;
  SeededRng rng_;
  std::vector<double> means_;
};

// Regret bench --------------------------------------------------------------

inline std::string bound_kind(const LearnerSpec& s) { return s.algorithm == "mw" ? "external" : "swap"; }

inline double regret_bench_bound(const ExperimentConfig& c) {
  const auto& r = *c.regret_bench;
  return r.feedback == "bandit" ? bandit_bound(c.learner, r.arms, r.horizon) : inner_bound(c.learner, r.arms, r.horizon);
}

inline Json regret_bench_rows(const ExperimentConfig& c, std::uint64_t seed) {
  const auto& r = *c.regret_bench;
  LossSuite suite(r.suite, r.arms, r.horizon, seed);
  std::vector<std::size_t> plays;
  plays.reserve(r.horizon);
  Json rows = Json::array();
  SeededRng rf(seed, streams::kLearner);
  if (r.feedback == "bandit") {
    auto mb = make_mono_bandit(c.learner, r.arms, r.horizon);
    SeededRng rb(seed, streams::kExploration);
    for (std::size_t t = 0; t < r.horizon; ++t) {
      const auto l = suite.next(t, plays);
      const auto round = mb.play(rb, rf, [&](std::size_t arm) { return l[arm]; });
      plays.push_back(round.arm);
      rows.push_back({{"round", t}, {"arm", round.arm}, {"explored", round.explored}, {"losses", l}});
    }
  } else {
    auto learner = make_learner(c.learner, r.arms, r.horizon, LossRange{0.0, 1.0});
    for (std::size_t t = 0; t < r.horizon; ++t) {
      const auto l = suite.next(t, plays);
      const std::size_t arm = sample(learner.distribution(), rf);
      learner.observe(l);
      plays.push_back(arm);
      rows.push_back({{"round", t}, {"arm", arm}, {"explored", false}, {"losses", l}});
    }
  }
  return rows;
}

/// Cumulative regrets after each row, from (arm, losses) pairs.
inline std::pair<std::vector<double>, std::vector<double>> cumulative_regrets(const Json& rows, std::size_t k) {
  RegretTracker tr(k);
  std::vector<double> ext, sw;
  ext.reserve(rows.size());
  sw.reserve(rows.size());
  for (const auto& row : rows) {
    tr.push(row.at("arm").get<std::size_t>(), row.at("losses").get<std::vector<double>>());
    ext.push_back(tr.external());
    sw.push_back(tr.swap());
  }
  return {ext, sw};
}

inline std::pair<std::vector<std::size_t>, LossMatrix> plays_and_losses(const Json& rows) {
  std::vector<std::size_t> plays;
  LossMatrix losses;
  for (const auto& row : rows) {
    plays.push_back(row.at("arm").get<std::size_t>());
    losses.push_back(row.at("losses").get<std::vector<double>>());
  }
  return {plays, losses};
}

inline Json regret_bench_summary(const ExperimentConfig& c, const Json& rows) {
  const auto [plays, losses] = plays_and_losses(rows);
  const auto ext = external_regret(plays, losses);
  const auto sw = swap_regret(plays, losses);
  std::size_t explored = 0;
  for (const auto& row : rows) explored += row.at("explored").get<bool>() ? 1 : 0;
  const double bound = regret_bench_bound(c);
  const std::string kind = bound_kind(c.learner);
  const double value = kind == "external" ? ext.value : sw.value;
  return {{"external_regret", ext.value},
          {"best_fixed_arm", ext.best_fixed_arm},
          {"swap_regret", sw.value},
          {"best_swap", sw.best_swap},
          {"explore_rounds", explored},
          {"bound", bound},
          {"bound_kind", kind},
          {"bound_satisfied", value <= bound}};
}

inline std::string regret_bench_csv(const Json& rows, std::size_t k) {
  const auto [ext, sw] = cumulative_regrets(rows, k);
  std::string out;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& row = rows[t];
    const auto arm = row.at("arm").get<std::size_t>();
    out += csv_line(t, std::to_string(arm), row.at("explored").get<bool>(), row.at("losses")[arm].get<double>(), 0.0,
                    0.0, ext[t], sw[t]);
  }
  return out;
}

inline Json regret_bench_aggregate(const ExperimentConfig& c, const Json& runs) {
  double ext = 0.0, sw = 0.0;
  for (const auto& r : runs) {
    ext += r.at("summary").at("external_regret").get<double>();
    sw += r.at("summary").at("swap_regret").get<double>();
  }
  const auto n = static_cast<double>(runs.size());
  ext /= n;
  sw /= n;
  const double bound = regret_bench_bound(c);
  const std::string kind = bound_kind(c.learner);
  return {{"seeds", runs.size()},
          {"mean_external_regret", ext},
          {"mean_swap_regret", sw},
          {"bound", bound},
          {"bound_kind", kind},
          {"bound_satisfied", (kind == "external" ? ext : sw) <= bound}};
}

// Monotonicity check --------------------------------------------------------

inline Json monotone_check_rows(const ExperimentConfig& c, std::uint64_t seed) {
  const auto& m = *c.monotone_check;
  SeededRng rng(seed, streams::kData);
  Json rows = Json::array();
  const bool bandit = m.learner == "bandit-mw";
  const std::size_t max_h = bandit ? std::min(m.max_horizon, kExactMaxHorizon) : m.max_horizon;
  const std::size_t max_k = bandit ? std::min(m.max_arms, kExactMaxArms) : m.max_arms;
  for (std::size_t p = 0; p < m.pairs; ++p) {
    const auto pair = random_perturbation_pair(rng, max_h, max_k, LossRange{0.0, 1.0});
    const std::size_t k = pair.num_arms(), horizon = pair.horizon();
    MonotonicityVerdict v;
    if (m.learner == "mw") {
      v = check_full_info([&] { return ExpWeights(k, m.eta); }, pair, m.tolerance);
    } else if (m.learner == "treeswap") {
      const double eta = m.eta;
      const std::size_t depth = c.learner.depth;
      v = check_full_info(
          [&] {
            return TreeSwap<ExpWeights>(k, TreeSwapParams{horizon, depth, 0},
                                        [k, eta](const TreeLevel&) { return ExpWeights(k, eta); });
          },
          pair, m.tolerance);
    } else {
      v = check_mono_bandit_exact([&] { return ExpWeights(k, m.eta); }, m.epsilon, pair, m.tolerance);
    }
    rows.push_back({{"pair", p},
                    {"horizon", horizon},
                    {"arms", k},
                    {"round", pair.round},
                    {"arm", pair.arm},
                    {"delta", pair.delta},
                    {"violations", v.violating_rounds.size()},
                    {"max_violation", v.max_violation}});
  }
  return rows;
}

inline Json monotone_check_summary(const ExperimentConfig& c, const Json& rows) {
  std::size_t violating = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    violating += r.at("violations").get<std::size_t>() > 0 ? 1 : 0;
    worst = std::max(worst, r.at("max_violation").get<double>());
  }
  return {{"learner", c.monotone_check->learner},
          {"pairs", rows.size()},
          {"violating_pairs", violating},
          {"max_violation", worst},
          {"monotone", violating == 0}};
}

inline Json monotone_check_aggregate(const ExperimentConfig&, const Json& runs) {
  std::size_t pairs = 0, violating = 0;
  double worst = 0.0;
  for (const auto& r : runs) {
    pairs += r.at("summary").at("pairs").get<std::size_t>();
    violating += r.at("summary").at("violating_pairs").get<std::size_t>();
    worst = std::max(worst, r.at("summary").at("max_violation").get<double>());
  }
  return {{"pairs", pairs}, {"violating_pairs", violating}, {"max_violation", worst}, {"monotone", violating == 0}};
}

// Games ---------------------------------------------------------------------

inline contracting::GameSpec build_game_spec(const io::GameConfig& g, std::uint64_t seed) {
  contracting::GameSpec s;
  try {
    s.model = io::make_model(g.outcomes);
    s.contract = io::make_contract(g.contract);
    for (const auto& a : g.agents) {
      contracting::AgentSpec spec{io::make_cost(a.cost), contracting::Belief::known()};
      if (!a.belief.empty()) spec.belief = contracting::Belief::iid(Distribution::from_probs(a.belief));
      s.agents.push_back(spec);
      s.policies.push_back(io::make_policy(a.policy));
    }
    if (!g.states.sequence.empty()) {
      s.states = g.states.sequence;
    } else {
      s.states = contracting::sample_states(Distribution::from_probs(g.states.iid), g.horizon,
                                            g.states.seed.value_or(seed));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: game: ") + e.what());
  }
  s.validate();
  return s;
}

inline bool game_uses_bandit(const io::GameConfig& g) { return g.mechanism.kind == "bandit"; }

/// Bandit bound over k + 1 arms (agents and the outside option).
inline double game_bound(const ExperimentConfig& c) {
  const auto& g = *c.game;
  return bandit_bound(c.learner, g.agents.size() + 1, g.horizon);
}

inline Json game_rows(const ExperimentConfig& c, std::uint64_t seed, contracting::GameKind kind) {
  const auto& g = *c.game;
  const auto spec = build_game_spec(g, seed);
  const std::size_t k = spec.num_agents();
  auto mech = game_uses_bandit(g)
                  ? contracting::SelectionMechanism::bandit(k, make_mono_bandit(c.learner, k + 1, g.horizon),
                                                            spec.contract, seed)
                  : contracting::SelectionMechanism::constant(k, g.mechanism.arm);
  const auto tr = contracting::play_game(spec, std::move(mech), seed, kind);
  Json rows = Json::array();
  for (const auto& r : tr.rows) {
    rows.push_back({{"round", r.round},
                    {"arm", r.arm},
                    {"explored", r.explored},
                    {"state", r.state},
                    {"effort", r.effort},
                    {"outcome", r.outcome ? Json(*r.outcome) : Json(nullptr)},
                    {"return", r.realized_return},
                    {"payment", r.payment},
                    {"tab", r.tab},
                    {"principal_utility", r.principal_utility},
                    {"agent_utility", r.agent_utility},
                    {"losses", r.losses},
                    {"benchmark", r.benchmark}});
  }
  return rows;
}

inline Json game_summary(const ExperimentConfig& c, const Json& rows, contracting::GameKind kind) {
  const auto& g = *c.game;
  const std::size_t k = g.agents.size();
  const bool limited = kind == contracting::GameKind::kLimitedLiability;
  const double alpha = g.contract.alpha;
  std::vector<double> payments(k, 0.0), tabs(k, 0.0), bench(k, 0.0);
  double returns = 0.0, min_tab = 0.0;
  for (const auto& row : rows) {
    const auto arm = row.at("arm").get<std::size_t>();
    const auto b = row.at("benchmark").get<std::vector<double>>();
    for (std::size_t i = 0; i < k; ++i) bench[i] += b[i];
    if (arm >= k) continue;
    const double r = row.at("return").get<double>();
    returns += r;
    if (limited) {
      tabs[arm] += alpha * r;
      min_tab = std::min(min_tab, tabs[arm]);
    } else {
      payments[arm] += row.at("payment").get<double>();
    }
  }
  std::vector<double> payouts = payments;
  if (limited)
    for (std::size_t i = 0; i < k; ++i) payouts[i] = std::max(0.0, tabs[i]);
  double principal = returns;
  for (double p : payouts) principal -= p;
  const double policy_regret = *std::max_element(bench.begin(), bench.end()) - principal;
  const auto [plays, losses] = plays_and_losses(rows);
  Json s{{"principal_utility", principal},
         {"policy_regret", policy_regret},
         {"benchmark_totals", bench},
         {"external_regret", external_regret(plays, losses).value},
         {"swap_regret", swap_regret(plays, losses).value},
         {"payments", payments},
         {"payouts", payouts}};
  if (limited) {
    s["final_tabs"] = tabs;
    s["min_running_tab"] = min_tab;
  }
  if (game_uses_bandit(g)) {
    const double bound = game_bound(c);
    s["bound"] = bound;
    s["policy_regret_satisfied"] = policy_regret <= bound;
  }
  return s;
}

inline std::string game_csv(const Json& rows, std::size_t k) {
  const auto [ext, sw] = cumulative_regrets(rows, k + 1);
  std::string out;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& row = rows[t];
    const auto arm = row.at("arm").get<std::size_t>();
    out += csv_line(t, arm >= k ? std::string("none") : std::to_string(arm), row.at("explored").get<bool>(),
                    row.at("return").get<double>(), row.at("payment").get<double>(), row.at("tab").get<double>(),
                    ext[t], sw[t]);
  }
  return out;
}

inline Json game_aggregate(const ExperimentConfig& c, const Json& runs, contracting::GameKind kind) {
  const auto& g = *c.game;
  const std::size_t k = g.agents.size();
  const bool limited = kind == contracting::GameKind::kLimitedLiability;
  const auto n = static_cast<double>(runs.size());
  double regret = 0.0, principal = 0.0;
  std::vector<double> tabs(k, 0.0), payouts(k, 0.0);
  bool payouts_nonnegative = true;
  for (const auto& r : runs) {
    const auto& s = r.at("summary");
    regret += s.at("policy_regret").get<double>() / n;
    principal += s.at("principal_utility").get<double>() / n;
    const auto p = s.at("payouts").get<std::vector<double>>();
    for (std::size_t i = 0; i < k; ++i) {
      payouts[i] += p[i] / n;
      payouts_nonnegative = payouts_nonnegative && p[i] >= 0.0;
    }
    if (limited) {
      const auto t = s.at("final_tabs").get<std::vector<double>>();
      for (std::size_t i = 0; i < k; ++i) tabs[i] += t[i] / n;
    }
  }
  Json a{{"seeds", runs.size()},
         {"mean_policy_regret", regret},
         {"mean_principal_utility", principal},
         {"mean_payouts", payouts}};
  if (limited) {
    a["mean_final_tabs"] = tabs;
    a["payouts_nonnegative"] = payouts_nonnegative;
  }
  if (game_uses_bandit(g)) {
    const double bound = game_bound(c);
    a["bound"] = bound;
    a["policy_regret_satisfied"] = regret <= bound;
    if (limited) {
      const double liability = g.contract.alpha * bound;
      bool ok = true;
      for (double t : tabs) ok = ok && t >= -liability;
      a["liability_bound"] = liability;
      a["liability_satisfied"] = ok;
    }
  }
  return a;
}

// Golden counterexample -----------------------------------------------------

inline appendix_b::GoldenFixture appendix_fixture(const ExperimentConfig& c) {
  const std::string path = c.appendix_b ? c.appendix_b->fixture : std::string();
  return path.empty() ? appendix_b::builtin_fixture() : appendix_b::load_fixture(path);
}

inline Json appendix_rows(const appendix_b::Report& rep) {
  Json rows = Json::array();
  const std::size_t rounds[] = {1, 2, 3, 4, 5, 96, 97, 98, 99, 100};
  for (const char* name : {"l1", "l2", "diff"}) {
    const auto block = rep.published_rows(name);
    for (std::size_t r = 0; r < block.size(); ++r)
      rows.push_back({{"matrix", name}, {"round", rounds[r]}, {"values", block[r]}});
  }
  // The fixture pins the l2 head to rounds 2-6, so round 6 is recorded too.
  rows.push_back({{"matrix", "l2"}, {"round", 6}, {"values", rep.l2[5].vector()}});
  return rows;
}

inline Json appendix_summary(const ExperimentConfig& c, const Json& rows) {
  const auto fx = appendix_fixture(c);
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> computed;
  for (const auto& r : rows)
    computed[{r.at("matrix").get<std::string>(), r.at("round").get<std::size_t>()}] =
        r.at("values").get<std::vector<double>>();
  std::size_t cells = 0;
  double max_err = 0.0;
  Json mismatches = Json::array();
  for (const auto& [name, golden] : fx.matrices)
    for (const auto& g : golden) {
      const auto it = computed.find({name, g.round});
      for (std::size_t j = 0; j < g.values.size(); ++j) {
        ++cells;
        const double v = it == computed.end() ? std::nan("") : it->second[j];
        const double err = std::abs(v - g.values[j]);
        if (!(err <= fx.tolerance)) {
          mismatches.push_back({{"matrix", name}, {"round", g.round}, {"column", j}, {"expected", g.values[j]},
                                {"computed", it == computed.end() ? Json(nullptr) : Json(v)}});
        } else {
          max_err = std::max(max_err, err);
        }
      }
    }
  Json negative = Json::array();
  for (const auto& r : rows)
    if (r.at("matrix") == "diff" && r.at("values")[0].get<double>() < 0.0) negative.push_back(r.at("round"));
  return {{"cells_checked", cells},
          {"max_abs_error", max_err},
          {"tolerance", fx.tolerance},
          {"mismatches", mismatches},
          {"golden_ok", mismatches.empty() && cells > 0},
          {"negative_first_column_rounds", negative}};
}

// Desk ----------------------------------------------------------------------

inline desk::TinyGameSpec build_desk_spec(const io::DeskConfig& d) {
  desk::TinyGameSpec s;
  try {
    s.model = io::make_model(d.outcomes);
    s.contract = io::make_contract(d.contract);
    for (const auto& c : d.costs) s.costs.push_back(io::make_cost(c));
    for (const auto& q : d.state_dists) s.state_dists.push_back(Distribution::from_probs(q));
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: desk: ") + e.what());
  }
  s.grid = d.grid;
  const std::size_t k = d.costs.size();
  if (d.mechanism.kind == "constant") {
    s.mechanism = desk::TinyMechanism::constant(k, d.mechanism.arm);
  } else if (d.mechanism.kind == "score") {
    if (k != 2) throw ConfigError("config: desk.mechanism: score rule needs two agents");
    s.mechanism = desk::score_mechanism(d.outcomes.returns, d.mechanism.coins, d.state_dists.size(), d.mechanism.beta);
  } else {
    desk::TinyMechanism::Table table;
    for (const auto& e : d.mechanism.entries) {
      desk::PrincipalHistory h;
      for (const auto& [arm, o] : e.history) h.push_back({arm, o});
      table[{h, e.coin}] = e.select;
    }
    s.mechanism = desk::TinyMechanism::tabulated(k, d.mechanism.coins, std::move(table));
  }
  s.validate();
  return s;
}

inline Json desk_rows(const ExperimentConfig& c, std::uint64_t seed) {
  const auto spec = build_desk_spec(*c.desk);
  SeededRng rng(seed, streams::kData);
  Json rows = Json::array();
  for (std::size_t n = 0; n < c.desk->deviations; ++n) {
    desk::PolicyProfile base;
    for (std::size_t i = 0; i < spec.num_agents(); ++i) base.push_back(desk::random_policy(rng, spec));
    auto dev = base;
    const auto j = std::min(spec.num_agents() - 1,
                            static_cast<std::size_t>(rng.uniform01() * static_cast<double>(spec.num_agents())));
    dev[j] = desk::deviate_once(rng, spec, dev[j]);
    const auto r = desk::check_subgame_decomposition(spec, base, dev, j);
    rows.push_back({{"deviation", n},
                    {"agent", j},
                    {"round", r.round},
                    {"prefix_probability", r.prefix_probability},
                    {"delta_total", r.delta_total},
                    {"delta_subgame", r.delta_subgame},
                    {"residual", r.residual}});
  }
  return rows;
}

inline Json desk_summary(const ExperimentConfig&, const Json& rows) {
  double worst = 0.0;
  for (const auto& r : rows) {
    const double recomputed = std::abs(r.at("delta_total").get<double>() -
                                       r.at("prefix_probability").get<double>() * r.at("delta_subgame").get<double>());
    worst = std::max(worst, recomputed);
  }
  return {{"deviations", rows.size()}, {"max_residual", worst}, {"decomposition_ok", worst <= desk::kExactTol}};
}

/// Seed-independent desk checks: myopic optimality under constant selection
/// of each agent and exact-versus-Monte-Carlo agreement under myopic play.
inline Json desk_checks(const ExperimentConfig& c, std::uint64_t seed) {
  const auto spec = build_desk_spec(*c.desk);
  Json out = Json::object();
  Json myopic = Json::array();
  bool myopic_ok = true;
  for (std::size_t i = 0; i < spec.num_agents(); ++i) {
    auto constant = spec;
    constant.mechanism = desk::TinyMechanism::constant(spec.num_agents(), i);
    const auto v = desk::check_myopic_under_constant(constant, i);
    myopic_ok = myopic_ok && v.holds;
    myopic.push_back({{"agent", i},
                      {"holds", v.holds},
                      {"best_utility", v.best_utility},
                      {"myopic_utility", v.myopic_utility},
                      {"policies", v.policies_enumerated}});
  }
  desk::PolicyProfile prof;
  for (std::size_t i = 0; i < spec.num_agents(); ++i) prof.push_back(desk::myopic_policy(spec, i));
  Json mc = Json::array();
  bool mc_ok = true;
  for (std::size_t i = 0; i < spec.num_agents(); ++i) {
    const double exact = desk::exact_utility(spec, prof, i);
    const auto est = desk::monte_carlo_utility(spec, prof, i, c.desk->mc_samples, seed);
    const double z = est.standard_error > 0.0 ? (est.mean - exact) / est.standard_error
                                              : (est.mean == exact ? 0.0 : INFINITY);
    mc_ok = mc_ok && std::abs(z) <= 3.0;
    mc.push_back({{"agent", i}, {"exact", exact}, {"mean", est.mean}, {"standard_error", est.standard_error}, {"z", z}});
  }
  out["myopic_under_constant"] = myopic;
  out["myopic_ok"] = myopic_ok;
  out["monte_carlo"] = mc;
  out["monte_carlo_ok"] = mc_ok;
  return out;
}

// Dispatch ------------------------------------------------------------------

inline contracting::GameKind game_kind(const ExperimentConfig& c) {
  return c.experiment == "simulate-game2" ? contracting::GameKind::kLimitedLiability
                                          : contracting::GameKind::kFullLiability;
}

inline bool is_game(const ExperimentConfig& c) {
  return c.experiment == "simulate-game1" || c.experiment == "simulate-game2";
}

inline Json summarize(const ExperimentConfig& c, const Json& rows) {
  if (c.experiment == "regret-bench") return regret_bench_summary(c, rows);
  if (c.experiment == "monotone-check") return monotone_check_summary(c, rows);
  if (is_game(c)) return game_summary(c, rows, game_kind(c));
  if (c.experiment == "repro-appendix-b") return appendix_summary(c, rows);
  return desk_summary(c, rows);
}

inline Json aggregate(const ExperimentConfig& c, const Json& runs) {
  if (c.experiment == "regret-bench") return regret_bench_aggregate(c, runs);
  if (c.experiment == "monotone-check") return monotone_check_aggregate(c, runs);
  if (is_game(c)) return game_aggregate(c, runs, game_kind(c));
  bool ok = true;
  for (const auto& r : runs) {
    const auto& s = r.at("summary");
    if (c.experiment == "repro-appendix-b") ok = ok && s.at("golden_ok").get<bool>();
    else ok = ok && s.at("decomposition_ok").get<bool>();
  }
  return {{"seeds", runs.size()}, {"ok", ok}};
}

/// Names of false flags in an aggregate or desk check block.
inline std::vector<std::string> failed_flags(const Json& j, const std::string& where) {
  std::vector<std::string> f;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.value().is_boolean() && !it.value().get<bool>()) f.push_back(where + "." + it.key());
  return f;
}

/// Runs one seed: rows, summary and (for some kinds) extra checks and CSV.
struct SeedResult {
  Json run;
  std::string csv;
};

inline SeedResult run_seed(const ExperimentConfig& c, std::uint64_t seed, const std::string& hash) {
  Json rows;
  Json extra;
  if (c.experiment == "regret-bench") {
    rows = regret_bench_rows(c, seed);
  } else if (c.experiment == "monotone-check") {
    rows = monotone_check_rows(c, seed);
  } else if (is_game(c)) {
    rows = game_rows(c, seed, game_kind(c));
  } else if (c.experiment == "repro-appendix-b") {
    const auto rep = appendix_b::reproduce(appendix_fixture(c));
    rows = appendix_rows(rep);
    Json viol = Json::array();
    for (const auto& v : rep.verdict.violating_rounds) viol.push_back(v.round);
    extra = {{"trajectory_violating_rounds", viol}};
  } else {
    rows = desk_rows(c, seed);
    extra = desk_checks(c, seed);
  }
  SeedResult out;
  out.run = {{"seed", seed}, {"rows", rows}, {"rows_digest", rows_digest(rows)}, {"summary", summarize(c, rows)}};
  if (!extra.is_null()) out.run["checks"] = extra;
  if (c.output.csv) {
    if (c.experiment == "regret-bench") out.csv = csv_preamble(hash, seed) + regret_bench_csv(rows, c.regret_bench->arms);
    if (is_game(c)) out.csv = csv_preamble(hash, seed) + game_csv(rows, c.game->agents.size());
  }
  return out;
}

inline std::vector<std::uint64_t> replicate_seeds(const ExperimentConfig& c) {
  std::vector<std::uint64_t> s;
  const std::size_t n = c.experiment == "repro-appendix-b" ? 1 : c.seeds.replicates;
  for (std::size_t r = 0; r < n; ++r) s.push_back(c.seeds.base + r);
  return s;
}

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers. Exceptions are
/// rethrown in index order after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline RunOutput run_experiment(const ExperimentConfig& c) {
  const std::string hash = io::config_hash(c);
  const auto seeds = replicate_seeds(c);
  std::vector<SeedResult> results(seeds.size());
  parallel_for(seeds.size(), c.threads, [&](std::size_t i) { results[i] = run_seed(c, seeds[i], hash); });

  RunOutput out;
  Json runs = Json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!results[i].csv.empty())
      out.files.emplace_back(c.output.prefix + "_seed" + std::to_string(seeds[i]) + ".csv", std::move(results[i].csv));
    runs.push_back(std::move(results[i].run));
  }
  Json agg = aggregate(c, runs);
  out.failures = failed_flags(agg, "aggregate");
  for (const auto& r : runs)
    if (r.contains("checks"))
      for (auto& f : failed_flags(r.at("checks"), "seed " + std::to_string(r.at("seed").get<std::uint64_t>())))
        out.failures.push_back(f);
  out.status = out.failures.empty() ? kExitOk : kExitCheckFailed;
  out.record = {{"format", kRecordFormat},
                {"experiment", c.experiment},
                {"config", io::canonical_json(c)},
                {"config_hash", hash},
                {"runs", std::move(runs)},
                {"aggregate", std::move(agg)},
                {"status", out.status == kExitOk ? "ok" : "check-failed"}};
  out.files.emplace_back(c.output.prefix + ".json", out.record.dump(1) + "\n");
  if (c.experiment == "repro-appendix-b") {
    std::string csv = "# config_hash " + hash + "\nmatrix,round,p0,p1,p2\n";
    for (const auto& r : out.record["runs"][0]["rows"]) {
      csv += r.at("matrix").get<std::string>() + "," + std::to_string(r.at("round").get<std::size_t>());
      for (const auto& v : r.at("values")) csv += "," + fmt8(v.get<double>());
      csv += "\n";
    }
    out.files.emplace_back(c.output.prefix + "_matrices.csv", csv);
  }
  return out;
}

// Verification --------------------------------------------------------------

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;

  void fail(std::string what) {
    ok = false;
    problems.push_back(std::move(what));
  }
};

/// Compares two JSON values; numbers within kVerifyTol (relative for
/// magnitudes above one).
inline void compare_json(const Json& expected, const Json& actual, const std::string& path, VerifyReport& rep) {
  if (expected.is_number() && actual.is_number()) {
    const double a = expected.get<double>(), b = actual.get<double>();
    const double scale = std::max(1.0, std::abs(a));
    if (!(std::abs(a - b) <= kVerifyTol * scale) && !(std::isinf(a) && a == b))
      rep.fail(path + ": recorded " + actual.dump() + ", recomputed " + expected.dump());
    return;
  }
  if (expected.type() != actual.type()) {
    rep.fail(path + ": type differs");
    return;
  }
  if (expected.is_object()) {
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      if (!actual.contains(it.key())) rep.fail(path + "." + it.key() + ": missing");
      else compare_json(it.value(), actual.at(it.key()), path + "." + it.key(), rep);
    }
    for (auto it = actual.begin(); it != actual.end(); ++it)
      if (!expected.contains(it.key())) rep.fail(path + "." + it.key() + ": unexpected field");
    return;
  }
  if (expected.is_array()) {
    if (expected.size() != actual.size()) {
      rep.fail(path + ": length differs");
      return;
    }
    for (std::size_t i = 0; i < expected.size(); ++i)
      compare_json(expected[i], actual[i], path + "[" + std::to_string(i) + "]", rep);
    return;
  }
  if (expected != actual) rep.fail(path + ": recorded " + actual.dump() + ", recomputed " + expected.dump());
}

/// Recomputes the config hash, every row digest, every summary and the
/// aggregate of a record.
inline VerifyReport verify_record(const Json& record) {
  VerifyReport rep;
  try {
    if (!record.is_object() || record.value("format", "") != kRecordFormat) {
      rep.fail("not a run record");
      return rep;
    }
    const auto c = io::config_from_json(record.at("config"));
    if (io::config_hash(c) != record.at("config_hash").get<std::string>()) rep.fail("config_hash does not match config");
    const Json& runs = record.at("runs");
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& r = runs[i];
      const std::string where = "runs[" + std::to_string(i) + "]";
      if (rows_digest(r.at("rows")) != r.at("rows_digest").get<std::string>()) rep.fail(where + ".rows_digest mismatch");
      compare_json(summarize(c, r.at("rows")), r.at("summary"), where + ".summary", rep);
    }
    compare_json(aggregate(c, runs), record.at("aggregate"), "aggregate", rep);
  } catch (const std::exception& e) {
    rep.fail(std::string("malformed record: ") + e.what());
  }
  return rep;
}

}  // namespace monocontract::experiments
