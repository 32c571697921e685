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
/// Repeated agent-selection games. Each round the principal's mechanism picks
/// one of k agents or the outside option, the agent exerts effort, an outcome
/// is drawn, and the contract pays out either immediately (full liability) or
/// into a tab settled at the end as max(0, tab) (limited liability).

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "monocontract/contracting/model.hpp"
#include "monocontract/learner.hpp"
#include "monocontract/mono_bandit.hpp"
#include "monocontract/regret.hpp"

namespace monocontract::contracting {

/// Loss fed to the selection learner for principal utility u in [-1, 1].
inline double principal_loss(double u) { return (1.0 - u) / 2.0; }

/// One entry of the principal transcript: the only information a mechanism
/// ever receives.
struct PrincipalObservation {
  std::size_t arm = 0;
  double realized_return = 0.0;
};

struct Selection {
  std::size_t arm = 0;
  bool explored = false;
};

/// Selection mechanism over k agents plus the outside option (arm k).
class SelectionMechanism {
 public:
  /// Always selects `arm` (k selects the outside option).
  static SelectionMechanism constant(std::size_t agents, std::size_t arm) {
    if (arm > agents) throw ConfigError("constant mechanism: arm out of range");
    SelectionMechanism m(agents);
    m.impl_ = Constant{arm};
    return m;
  }

  /// Bandit over k + 1 arms. Its draws come from the exploration and learner
  /// streams of `seed`.
  static SelectionMechanism bandit(std::size_t agents, MonoBandit<AnyLearner> mb, Contract contract,
                                   std::uint64_t seed) {
    if (mb.num_arms() != agents + 1) throw ConfigError("bandit mechanism: learner must cover k + 1 arms");
    SelectionMechanism m(agents);
    m.impl_ = Bandit{std::move(mb), std::move(contract), SeededRng(seed, streams::kExploration),
                     SeededRng(seed, streams::kLearner), std::nullopt};
    return m;
  }

  std::size_t num_agents() const noexcept { return agents_; }
  std::size_t outside_option() const noexcept { return agents_; }
  bool is_constant() const noexcept { return std::holds_alternative<Constant>(impl_); }

  Selection select() {
    if (auto* c = std::get_if<Constant>(&impl_)) return Selection{c->arm, false};
    auto& b = std::get<Bandit>(impl_);
    b.pending = decode_explore_draw(b.explore.uniform01(), b.mb.epsilon(), b.mb.num_arms());
    if (*b.pending) return Selection{**b.pending, true};
    return Selection{sample(b.mb.distribution(), b.learner), false};
  }

  void observe(const PrincipalObservation& obs) {
    auto* b = std::get_if<Bandit>(&impl_);
    if (b == nullptr) return;
    if (!b->pending) throw DomainError("mechanism: observe() without select()");
    const double u = obs.arm == agents_ ? 0.0 : b->contract.principal_share(obs.realized_return);
    b->mb.advance(*b->pending, principal_loss(u));
    b->pending.reset();
  }

  /// Selection probabilities of the next round (point mass when constant).
  Distribution selection_distribution() const {
    if (const auto* c = std::get_if<Constant>(&impl_)) return Distribution::point_mass(agents_ + 1, c->arm);
    return std::get<Bandit>(impl_).mb.selection_distribution();
  }

 private:
  struct Constant {
    std::size_t arm;
  };
  struct Bandit {
    MonoBandit<AnyLearner> mb;
    Contract contract;
    SeededRng explore, learner;
    std::optional<ExploreBranch> pending;
  };

  explicit SelectionMechanism(std::size_t agents) : agents_(agents) {}

  std::size_t agents_;
  std::variant<Constant, Bandit> impl_;
};

struct GameSpec {
  OutcomeModel model;
  Contract contract = Contract::linear(0.5);
  std::vector<AgentSpec> agents;
  std::vector<AgentPolicy> policies;
  /// Realized state of nature per round.
  std::vector<std::size_t> states;

  std::size_t num_agents() const noexcept { return agents.size(); }
  std::size_t horizon() const noexcept { return states.size(); }

  void validate() const {
    if (agents.empty()) throw ConfigError("game: at least one agent required");
    if (model.num_agents() != agents.size())
      throw ConfigError("game: outcome model covers " + std::to_string(model.num_agents()) + " agents, spec has " +
                        std::to_string(agents.size()));
    if (policies.size() != agents.size()) throw ConfigError("game: one policy per agent required");
    if (states.empty()) throw ConfigError("game: empty state sequence");
    for (std::size_t t = 0; t < states.size(); ++t)
      if (states[t] >= model.num_states())
        throw ConfigError("game: state " + std::to_string(states[t]) + " at round " + std::to_string(t) +
                          " outside the state alphabet");
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (!agents[i].belief.is_known() && agents[i].belief.distribution().size() != model.num_states())
        throw ConfigError("game: belief of agent " + std::to_string(i) + " has the wrong state count");
  }
};

enum class GameKind { kFullLiability, kLimitedLiability };

struct GameRound {
  std::size_t round = 0;
  std::size_t arm = 0;  // == number of agents for the outside option
  bool explored = false;
  std::size_t state = 0;
  double effort = 0.0;
  std::optional<std::size_t> outcome;
  double realized_return = 0.0;
  double payment = 0.0;  // paid this round; always 0 under the tab
  double tab = 0.0;      // selected agent's tab after the round (limited liability)
  double principal_utility = 0.0;
  double agent_utility = 0.0;
  /// Evaluation-only data, never shown to the mechanism.
  std::vector<double> efforts;    // every agent's effort this round
  std::vector<double> returns;    // every agent's return under the shared outcome draw
  std::vector<double> losses;     // k + 1 principal losses
  std::vector<double> benchmark;  // expected principal utility of each agent under constant selection
};

struct GameTranscript {
  GameKind kind = GameKind::kFullLiability;
  std::vector<GameRound> rows;
  std::vector<double> payments;  // per agent, paid during play
  std::vector<double> tabs;      // per agent, raw final tab
  std::vector<double> payouts;   // per agent, total transferred
  std::vector<double> costs;     // per agent, total effort cost when engaged
  double min_running_tab = 0.0;

  std::size_t num_agents() const noexcept { return payouts.size(); }

  /// Returns received minus money transferred.
  double principal_total() const {
    double r = 0.0;
    for (const auto& row : rows) r += row.realized_return;
    for (double p : payouts) r -= p;
    return r;
  }

  std::vector<double> agent_totals() const {
    std::vector<double> u(payouts.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = payouts[i] - costs[i];
    return u;
  }

  std::vector<std::size_t> plays() const {
    std::vector<std::size_t> p;
    p.reserve(rows.size());
    for (const auto& r : rows) p.push_back(r.arm);
    return p;
  }

  LossMatrix loss_matrix() const {
    LossMatrix m;
    m.reserve(rows.size());
    for (const auto& r : rows) m.push_back(r.losses);
    return m;
  }
};

/// Effort of agent i in a round with realized state y under its policy.
inline double agent_effort(const GameSpec& spec, std::size_t i, std::size_t y) {
  const auto belief = spec.agents[i].belief.for_round(y, spec.model.num_states());
  return spec.policies[i].effort(myopic_action(spec.agents[i], spec.model, spec.contract, i, belief));
}

/// Expected principal utility of engaging agent i, who plays myopically,
/// in a round with realized state y.
inline double benchmark_utility(const GameSpec& spec, std::size_t i, std::size_t y) {
  const auto belief = spec.agents[i].belief.for_round(y, spec.model.num_states());
  const double a = myopic_action(spec.agents[i], spec.model, spec.contract, i, belief);
  double u = 0.0;
  for (std::size_t o = 0; o < spec.model.num_outcomes(); ++o)
    u += spec.model.probability(i, o, a, y) * spec.contract.principal_share(spec.model.return_of(o));
  return u;
}

/// Plays one game. Outcome uniforms come from the outcome stream of `seed`,
/// one per agent per round, so every agent's counterfactual return is
/// defined on every round.
inline GameTranscript play_game(const GameSpec& spec, SelectionMechanism mechanism, std::uint64_t seed,
                                GameKind kind) {
  spec.validate();
  if (kind == GameKind::kLimitedLiability && !spec.contract.is_linear())
    throw ConfigError("limited-liability game requires a linear contract");
  const std::size_t k = spec.num_agents();
  if (mechanism.num_agents() != k) throw ConfigError("game: mechanism agent count differs from spec");

  GameTranscript tr;
  tr.kind = kind;
  tr.payments.assign(k, 0.0);
  tr.tabs.assign(k, 0.0);
  tr.costs.assign(k, 0.0);
  tr.rows.reserve(spec.horizon());
  SeededRng outcome_rng(seed, streams::kOutcome);

  for (std::size_t t = 0; t < spec.horizon(); ++t) {
    const std::size_t y = spec.states[t];
    GameRound row;
    row.round = t;
    row.state = y;
    row.efforts.resize(k);
    row.returns.resize(k);
    row.losses.resize(k + 1);
    row.benchmark.resize(k);
    std::vector<std::size_t> outcomes(k);
    for (std::size_t j = 0; j < k; ++j) {
      row.efforts[j] = agent_effort(spec, j, y);
      outcomes[j] = spec.model.sample_outcome(j, row.efforts[j], y, outcome_rng.uniform01());
      row.returns[j] = spec.model.return_of(outcomes[j]);
      row.losses[j] = principal_loss(spec.contract.principal_share(row.returns[j]));
      row.benchmark[j] = benchmark_utility(spec, j, y);
    }
    row.losses[k] = principal_loss(0.0);

    const Selection sel = mechanism.select();
    row.arm = sel.arm;
    row.explored = sel.explored;
    if (sel.arm < k) {
      const std::size_t i = sel.arm;
      const double r = row.returns[i];
      const double cost = spec.agents[i].cost(row.efforts[i]);
      row.effort = row.efforts[i];
      row.outcome = outcomes[i];
      row.realized_return = r;
      row.principal_utility = spec.contract.principal_share(r);
      tr.costs[i] += cost;
      if (kind == GameKind::kFullLiability) {
        row.payment = spec.contract.pay(r);
        row.agent_utility = row.payment - cost;
        tr.payments[i] += row.payment;
      } else {
        tr.tabs[i] += spec.contract.alpha() * r;
        row.tab = tr.tabs[i];
        row.agent_utility = -cost;
        tr.min_running_tab = std::min(tr.min_running_tab, tr.tabs[i]);
      }
    }
    mechanism.observe(PrincipalObservation{sel.arm, row.realized_return});
    tr.rows.push_back(std::move(row));
  }

  if (kind == GameKind::kFullLiability) {
    tr.payouts = tr.payments;
  } else {
    tr.payouts.resize(k);
    for (std::size_t i = 0; i < k; ++i) tr.payouts[i] = std::max(0.0, tr.tabs[i]);
  }
  return tr;
}

inline GameTranscript play_game1(const GameSpec& spec, SelectionMechanism mechanism, std::uint64_t seed) {
  return play_game(spec, std::move(mechanism), seed, GameKind::kFullLiability);
}

inline GameTranscript play_game2(const GameSpec& spec, SelectionMechanism mechanism, std::uint64_t seed) {
  return play_game(spec, std::move(mechanism), seed, GameKind::kLimitedLiability);
}

/// Per-agent benchmark totals: sum over rounds of benchmark_utility.
inline std::vector<double> benchmark_totals(const GameSpec& spec) {
  std::vector<double> b(spec.num_agents(), 0.0);
  for (std::size_t y : spec.states)
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += benchmark_utility(spec, i, y);
  return b;
}

/// Best agent's benchmark total minus the realized principal utility.
inline double policy_regret(const GameTranscript& tr, const GameSpec& spec) {
  const auto b = benchmark_totals(spec);
  return *std::max_element(b.begin(), b.end()) - tr.principal_total();
}

/// The same quantity from the benchmark column of the rows.
inline double policy_regret_from_rows(const GameTranscript& tr) {
  if (tr.rows.empty()) return 0.0;
  std::vector<double> b(tr.rows.front().benchmark.size(), 0.0);
  for (const auto& r : tr.rows)
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += r.benchmark[i];
  return *std::max_element(b.begin(), b.end()) - tr.principal_total();
}

/// Draws an i.i.d. state sequence from `q` using the data stream of `seed`.
inline std::vector<std::size_t> sample_states(const Distribution& q, std::size_t horizon, std::uint64_t seed) {
  SeededRng rng(seed, streams::kData);
  std::vector<std::size_t> s(horizon);
  for (auto& y : s) y = sample(q, rng);
  return s;
}

}  // namespace monocontract::contracting
