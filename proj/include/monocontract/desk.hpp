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
/// Exact enumeration of tiny agent-selection games.
///
/// Agents play non-responsive grid policies: the effort of round t is a
/// function of the restricted prefix, i.e. the realized states and the
/// mechanism's coins of rounds 0..t-1. Nothing an agent conditions on depends
/// on another agent's effort. Every expectation below is a finite sum over
/// states, coins and outcomes with outcome probabilities taken from the
/// affine model.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "monocontract/contracting/model.hpp"

namespace monocontract::desk {

using contracting::Contract;
using contracting::Cost;
using contracting::OutcomeModel;

inline constexpr std::size_t kMaxAgents = 2;
inline constexpr std::size_t kMaxHorizon = 3;
inline constexpr std::size_t kMaxStates = 2;
inline constexpr std::size_t kMaxGrid = 5;
inline constexpr std::size_t kMaxOutcomes = 2;
inline constexpr std::uint64_t kMaxTranscripts = 100'000;
inline constexpr std::uint64_t kMaxPolicies = 2'000'000;
inline constexpr double kExactTol = 1e-12;

/// One principal-visible step: the selected arm and its outcome. The outside
/// option has arm == number of agents and no outcome.
struct PrincipalStep {
  std::size_t arm = 0;
  std::optional<std::size_t> outcome;
  friend auto operator<=>(const PrincipalStep&, const PrincipalStep&) = default;
};

using PrincipalHistory = std::vector<PrincipalStep>;

/// Selection rule over principal histories and a uniform coin in [0, coins).
class TinyMechanism {
 public:
  using Rule = std::function<std::size_t(const PrincipalHistory&, std::size_t coin)>;
  using Table = std::map<std::pair<PrincipalHistory, std::size_t>, std::size_t>;

  static TinyMechanism constant(std::size_t agents, std::size_t arm) {
    if (arm > agents) throw ConfigError("desk mechanism: arm out of range");
    TinyMechanism m;
    m.agents_ = agents;
    m.constant_ = arm;
    return m;
  }

  static TinyMechanism tabulated(std::size_t agents, std::size_t coins, Table table) {
    if (coins == 0) throw ConfigError("desk mechanism: at least one coin value required");
    TinyMechanism m;
    m.agents_ = agents;
    m.coins_ = coins;
    for (const auto& [key, arm] : table)
      if (arm > agents) throw ConfigError("desk mechanism: table selects an arm out of range");
    m.table_ = std::move(table);
    return m;
  }

  /// Tabulates `rule` on every principal history shorter than `horizon`.
  static TinyMechanism from_rule(std::size_t agents, std::size_t coins, std::size_t horizon, std::size_t outcomes,
                                 const Rule& rule) {
    Table table;
    std::function<void(PrincipalHistory&)> walk = [&](PrincipalHistory& h) {
      if (h.size() >= horizon) return;
      for (std::size_t c = 0; c < coins; ++c) table[{h, c}] = rule(h, c);
      for (std::size_t a = 0; a <= agents; ++a) {
        if (a == agents) {
          h.push_back({a, std::nullopt});
          walk(h);
          h.pop_back();
          continue;
        }
        for (std::size_t o = 0; o < outcomes; ++o) {
          h.push_back({a, o});
          walk(h);
          h.pop_back();
        }
      }
    };
    PrincipalHistory h;
    walk(h);
    return tabulated(agents, coins, std::move(table));
  }

  std::size_t num_agents() const noexcept { return agents_; }
  std::size_t coins() const noexcept { return coins_; }
  bool is_constant() const noexcept { return constant_.has_value(); }
  std::optional<std::size_t> constant_arm() const noexcept { return constant_; }
  const Table& table() const noexcept { return table_; }

  std::size_t select(const PrincipalHistory& h, std::size_t coin) const {
    if (constant_) return *constant_;
    const auto it = table_.find({h, coin});
    if (it == table_.end())
      throw ConfigError("desk mechanism: no table entry for a history of length " + std::to_string(h.size()) +
                        ", coin " + std::to_string(coin));
    return it->second;
  }

 private:
  std::size_t agents_ = 0;
  std::size_t coins_ = 1;
  std::optional<std::size_t> constant_;
  Table table_;
};

struct TinyGameSpec {
  OutcomeModel model;
  Contract contract = Contract::linear(0.5);
  std::vector<Cost> costs;
  /// Distribution of the state in each round; agents know these.
  std::vector<Distribution> state_dists;
  /// Effort levels, strictly increasing within [0, 1].
  std::vector<double> grid;
  TinyMechanism mechanism = TinyMechanism::constant(1, 0);

  std::size_t num_agents() const noexcept { return costs.size(); }
  std::size_t horizon() const noexcept { return state_dists.size(); }
  std::size_t num_states() const noexcept { return model.num_states(); }
  std::size_t coins() const noexcept { return mechanism.coins(); }
  /// Number of distinct (state, coin) values per round.
  std::size_t step_values() const noexcept { return num_states() * coins(); }

  /// (states x coins x outcomes)^T.
  std::uint64_t transcript_count() const {
    std::uint64_t n = 1;
    const std::uint64_t per = num_states() * coins() * model.num_outcomes();
    for (std::size_t t = 0; t < horizon(); ++t) n *= per;
    return n;
  }

  /// Number of restricted prefixes agents act on at round t.
  std::size_t prefixes_at(std::size_t t) const {
    std::size_t n = 1;
    for (std::size_t s = 0; s < t; ++s) n *= step_values();
    return n;
  }

  void validate() const {
    const std::size_t k = num_agents();
    if (k == 0 || k > kMaxAgents) throw ConfigError("desk: agent count must be 1 or 2");
    if (model.num_agents() != k) throw ConfigError("desk: outcome model agent count differs from cost list");
    if (horizon() == 0 || horizon() > kMaxHorizon) throw ConfigError("desk: horizon must be 1..3");
    if (num_states() > kMaxStates) throw ConfigError("desk: at most two states");
    if (model.num_outcomes() > kMaxOutcomes) throw ConfigError("desk: at most two outcomes");
    if (grid.empty() || grid.size() > kMaxGrid) throw ConfigError("desk: effort grid must have 1..5 levels");
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (!(grid[j] >= 0.0 && grid[j] <= 1.0)) throw ConfigError("desk: grid levels must lie in [0, 1]");
      if (j > 0 && !(grid[j] > grid[j - 1])) throw ConfigError("desk: grid must increase strictly");
    }
    for (const auto& q : state_dists)
      if (q.size() != num_states()) throw ConfigError("desk: state distribution size differs from the model");
    if (mechanism.num_agents() != k) throw ConfigError("desk: mechanism agent count differs from spec");
    if (transcript_count() > kMaxTranscripts) throw ConfigError("desk: too many restricted transcripts");
  }
};

/// Grid policy of one agent: effort[t][prefix code] is an index into the
/// grid. Prefix codes are mixed-radix numbers whose digit s is
/// state_s * coins + coin_s.
struct GridPolicy {
  std::vector<std::vector<std::size_t>> effort;
  friend bool operator==(const GridPolicy&, const GridPolicy&) = default;
};

using PolicyProfile = std::vector<GridPolicy>;

/// (state, coin) of one elapsed round.
struct PrefixStep {
  std::size_t state = 0;
  std::size_t coin = 0;
};

inline std::size_t prefix_code(const TinyGameSpec& spec, const std::vector<PrefixStep>& prefix) {
  std::size_t code = 0, scale = 1;
  for (const auto& s : prefix) {
    code += (s.state * spec.coins() + s.coin) * scale;
    scale *= spec.step_values();
  }
  return code;
}

inline std::vector<PrefixStep> decode_prefix(const TinyGameSpec& spec, std::size_t t, std::size_t code) {
  std::vector<PrefixStep> p(t);
  for (auto& s : p) {
    const std::size_t digit = code % spec.step_values();
    code /= spec.step_values();
    s = {digit / spec.coins(), digit % spec.coins()};
  }
  return p;
}

/// Probability of a restricted prefix.
inline double prefix_probability(const TinyGameSpec& spec, const std::vector<PrefixStep>& prefix) {
  double p = 1.0;
  for (std::size_t s = 0; s < prefix.size(); ++s)
    p *= spec.state_dists[s][prefix[s].state] / static_cast<double>(spec.coins());
  return p;
}

inline GridPolicy constant_policy(const TinyGameSpec& spec, std::size_t grid_index) {
  GridPolicy p;
  for (std::size_t t = 0; t < spec.horizon(); ++t) p.effort.emplace_back(spec.prefixes_at(t), grid_index);
  return p;
}

inline void validate_profile(const TinyGameSpec& spec, const PolicyProfile& profile) {
  if (profile.size() != spec.num_agents()) throw ConfigError("desk: one policy per agent required");
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].effort.size() != spec.horizon())
      throw ConfigError("desk: policy of agent " + std::to_string(i) + " does not cover every round");
    for (std::size_t t = 0; t < spec.horizon(); ++t) {
      if (profile[i].effort[t].size() != spec.prefixes_at(t))
        throw ConfigError("desk: policy of agent " + std::to_string(i) + " leaves a prefix of round " +
                          std::to_string(t) + " undefined");
      for (std::size_t g : profile[i].effort[t])
        if (g >= spec.grid.size()) throw ConfigError("desk: policy effort index outside the grid");
    }
  }
}

/// Grid index maximising the single-round expected utility of agent i in
/// round t (smallest index on ties).
inline std::size_t myopic_grid_index(const TinyGameSpec& spec, std::size_t i, std::size_t t) {
  const contracting::AgentSpec agent{spec.costs[i], contracting::Belief::iid(spec.state_dists[t])};
  std::vector<double> v(spec.grid.size());
  for (std::size_t g = 0; g < v.size(); ++g)
    v[g] = contracting::myopic_objective(agent, spec.model, spec.contract, i, spec.state_dists[t], spec.grid[g]);
  const double best = *std::max_element(v.begin(), v.end());
  for (std::size_t g = 0; g < v.size(); ++g)
    if (v[g] >= best - kExactTol) return g;
  return 0;
}

inline GridPolicy myopic_policy(const TinyGameSpec& spec, std::size_t i) {
  GridPolicy p;
  for (std::size_t t = 0; t < spec.horizon(); ++t)
    p.effort.emplace_back(spec.prefixes_at(t), myopic_grid_index(spec, i, t));
  return p;
}

namespace detail {

class Enumerator {
 public:
  Enumerator(const TinyGameSpec& spec, const PolicyProfile& profile, std::size_t agent)
      : spec_(spec), profile_(profile), agent_(agent) {}

  /// Expected utility of the agent over rounds t.. given the principal
  /// history and the restricted prefix `code` of rounds 0..t-1.
  double from(std::size_t t, PrincipalHistory& history, std::size_t code, std::size_t scale) const {
    if (t == spec_.horizon()) return 0.0;
    const double pc = 1.0 / static_cast<double>(spec_.coins());
    double total = 0.0;
    for (std::size_t y = 0; y < spec_.num_states(); ++y) {
      const double qy = spec_.state_dists[t][y];
      if (qy == 0.0) continue;
      for (std::size_t c = 0; c < spec_.coins(); ++c)
        total += qy * pc * step(t, history, code, scale, y, c);
    }
    return total;
  }

  /// Expected utility of rounds t.. once round t's state and coin are fixed.
  double step(std::size_t t, PrincipalHistory& history, std::size_t code, std::size_t scale, std::size_t y,
              std::size_t c) const {
    const std::size_t next_code = code + (y * spec_.coins() + c) * scale;
    const std::size_t next_scale = scale * spec_.step_values();
    const std::size_t sel = spec_.mechanism.select(history, c);
    if (sel == spec_.num_agents()) {
      history.push_back({sel, std::nullopt});
      const double v = from(t + 1, history, next_code, next_scale);
      history.pop_back();
      return v;
    }
    const double a = spec_.grid[profile_[sel].effort[t][code]];
    const double cost = spec_.costs[sel](a);
    double total = 0.0;
    for (std::size_t o = 0; o < spec_.model.num_outcomes(); ++o) {
      const double po = spec_.model.probability(sel, o, a, y);
      if (po == 0.0) continue;
      const double u = sel == agent_ ? spec_.contract.pay(spec_.model.return_of(o)) - cost : 0.0;
      history.push_back({sel, o});
      total += po * (u + from(t + 1, history, next_code, next_scale));
      history.pop_back();
    }
    return total;
  }

 private:
  const TinyGameSpec& spec_;
  const PolicyProfile& profile_;
  std::size_t agent_;
};

}  // namespace detail

/// Expected total utility of agent i.
inline double exact_utility(const TinyGameSpec& spec, const PolicyProfile& profile, std::size_t i) {
  spec.validate();
  validate_profile(spec, profile);
  if (i >= spec.num_agents()) throw ConfigError("desk: agent index out of range");
  PrincipalHistory h;
  return detail::Enumerator(spec, profile, i).from(0, h, 0, 1);
}

/// Expected utility of agent i from round t onward, conditioned on the
/// restricted prefix of rounds 0..t-1. The outcomes of those rounds remain
/// random; they are enumerated with their effort-dependent probabilities.
inline double subgame_utility(const TinyGameSpec& spec, const PolicyProfile& profile, std::size_t i,
                              const std::vector<PrefixStep>& prefix) {
  spec.validate();
  validate_profile(spec, profile);
  const detail::Enumerator en(spec, profile, i);
  const std::size_t t = prefix.size();
  // Walk the fixed prefix, branching over outcomes only.
  std::function<double(std::size_t, PrincipalHistory&, std::size_t, std::size_t)> walk =
      [&](std::size_t s, PrincipalHistory& h, std::size_t code, std::size_t scale) -> double {
    if (s == t) return en.from(t, h, code, scale);
    const auto [y, c] = prefix[s];
    const std::size_t next_code = code + (y * spec.coins() + c) * scale;
    const std::size_t next_scale = scale * spec.step_values();
    const std::size_t sel = spec.mechanism.select(h, c);
    if (sel == spec.num_agents()) {
      h.push_back({sel, std::nullopt});
      const double v = walk(s + 1, h, next_code, next_scale);
      h.pop_back();
      return v;
    }
    const double a = spec.grid[profile[sel].effort[s][code]];
    double total = 0.0;
    for (std::size_t o = 0; o < spec.model.num_outcomes(); ++o) {
      const double po = spec.model.probability(sel, o, a, y);
      if (po == 0.0) continue;
      h.push_back({sel, o});
      total += po * walk(s + 1, h, next_code, next_scale);
      h.pop_back();
    }
    return total;
  };
  PrincipalHistory h;
  return walk(0, h, 0, 1);
}

struct SubgameCheck {
  std::size_t deviating_agent = 0;
  std::size_t round = 0;
  std::vector<PrefixStep> prefix;
  double prefix_probability = 0.0;
  double delta_total = 0.0;
  double delta_subgame = 0.0;
  double residual = 0.0;
};

/// Compares agent i's total utility change under a single-prefix deviation
/// with the prefix probability times the change of its subgame utility.
inline SubgameCheck check_subgame_decomposition(const TinyGameSpec& spec, const PolicyProfile& base,
                                                const PolicyProfile& deviated, std::size_t i) {
  validate_profile(spec, base);
  validate_profile(spec, deviated);
  std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> cell;
  for (std::size_t j = 0; j < base.size(); ++j)
    for (std::size_t t = 0; t < spec.horizon(); ++t)
      for (std::size_t code = 0; code < spec.prefixes_at(t); ++code)
        if (base[j].effort[t][code] != deviated[j].effort[t][code]) {
          if (cell) throw DomainError("subgame check: deviation alters more than one prefix");
          cell.emplace(j, t, code);
        }
  if (!cell) throw DomainError("subgame check: policies are identical");
  SubgameCheck r;
  const auto [j, t, code] = *cell;
  r.deviating_agent = j;
  r.round = t;
  r.prefix = decode_prefix(spec, t, code);
  r.prefix_probability = prefix_probability(spec, r.prefix);
  r.delta_total = exact_utility(spec, deviated, i) - exact_utility(spec, base, i);
  r.delta_subgame = subgame_utility(spec, deviated, i, r.prefix) - subgame_utility(spec, base, i, r.prefix);
  r.residual = std::abs(r.delta_total - r.prefix_probability * r.delta_subgame);
  return r;
}

namespace detail {

/// Calls visit(policy) for every grid policy of one agent.
template <typename Visit>
void for_each_policy(const TinyGameSpec& spec, Visit&& visit) {
  std::size_t cells = 0;
  for (std::size_t t = 0; t < spec.horizon(); ++t) cells += spec.prefixes_at(t);
  std::uint64_t total = 1;
  for (std::size_t c = 0; c < cells; ++c) {
    total *= spec.grid.size();
    if (total > kMaxPolicies) throw DomainError("desk: policy space too large to enumerate");
  }
  GridPolicy p = constant_policy(spec, 0);
  std::vector<std::size_t*> slots;
  for (auto& round : p.effort)
    for (auto& g : round) slots.push_back(&g);
  for (std::uint64_t n = 0; n < total; ++n) {
    visit(static_cast<const GridPolicy&>(p));
    for (auto* s : slots) {
      if (++*s < spec.grid.size()) break;
      *s = 0;
    }
  }
}

}  // namespace detail

struct BestResponse {
  double utility = 0.0;
  GridPolicy policy;
  /// Smallest round-0 effort among the optimal policies.
  double first_round_effort = 0.0;
  std::uint64_t policies_enumerated = 0;
};

/// Exhaustive best response of agent i with the other agents held fixed.
inline BestResponse best_response(const TinyGameSpec& spec, PolicyProfile profile, std::size_t i) {
  spec.validate();
  validate_profile(spec, profile);
  BestResponse br;
  br.utility = -1e300;
  std::vector<std::pair<double, double>> values;  // (utility, round-0 effort)
  detail::for_each_policy(spec, [&](const GridPolicy& p) {
    profile[i] = p;
    PrincipalHistory h;
    const double u = detail::Enumerator(spec, profile, i).from(0, h, 0, 1);
    ++br.policies_enumerated;
    values.emplace_back(u, spec.grid[p.effort[0][0]]);
    if (u > br.utility) {
      br.utility = u;
      br.policy = p;
    }
  });
  br.first_round_effort = 1e300;
  for (const auto& [u, a] : values)
    if (u >= br.utility - kExactTol) br.first_round_effort = std::min(br.first_round_effort, a);
  return br;
}

struct MyopicVerdict {
  bool holds = false;
  double best_utility = 0.0;
  double myopic_utility = 0.0;
  std::uint64_t policies_enumerated = 0;
};

/// Under the constant mechanism selecting agent i, the myopic grid policy
/// attains the maximum utility over all of agent i's grid policies.
inline MyopicVerdict check_myopic_under_constant(const TinyGameSpec& spec, std::size_t i) {
  spec.validate();
  if (spec.mechanism.constant_arm() != i) throw DomainError("myopic check: mechanism must always select agent i");
  PolicyProfile profile;
  for (std::size_t j = 0; j < spec.num_agents(); ++j) profile.push_back(myopic_policy(spec, j));
  MyopicVerdict v;
  v.myopic_utility = exact_utility(spec, profile, i);
  const auto br = best_response(spec, profile, i);
  v.best_utility = br.utility;
  v.policies_enumerated = br.policies_enumerated;
  v.holds = v.myopic_utility >= v.best_utility - kExactTol;
  return v;
}

struct IncentiveCheck {
  double best_response_effort = 0.0;
  double myopic_effort = 0.0;
  bool holds = false;
};

/// Grid-level necessary condition of the effort-dominance property: agent
/// i's best-response round-0 effort is at least its myopic round-0 effort.
inline IncentiveCheck check_agent_incentive(const TinyGameSpec& spec, const PolicyProfile& profile, std::size_t i) {
  IncentiveCheck c;
  c.best_response_effort = best_response(spec, profile, i).first_round_effort;
  c.myopic_effort = spec.grid[myopic_grid_index(spec, i, 0)];
  c.holds = c.best_response_effort >= c.myopic_effort;
  return c;
}

/// Two-agent rule selecting agent 0 with probability
/// clamp(1/2 + beta * (S_0 - S_1), 0, 1), where S_j is agent j's realized
/// return so far; coin c selects agent 0 iff (c + 1/2) / coins is below that
/// probability. A higher return for an agent never lowers its next-round
/// selection probability.
inline TinyMechanism score_mechanism(const std::vector<double>& returns, std::size_t coins, std::size_t horizon,
                                     double beta) {
  if (coins == 0) throw ConfigError("score mechanism: at least one coin value required");
  return TinyMechanism::from_rule(2, coins, horizon, returns.size(),
                                  [&returns, coins, beta](const PrincipalHistory& h, std::size_t c) {
                                    double score = 0.0;
                                    for (const auto& s : h)
                                      if (s.outcome) score += (s.arm == 0 ? 1.0 : -1.0) * returns[*s.outcome];
                                    const double p0 = std::clamp(0.5 + beta * score, 0.0, 1.0);
                                    return (static_cast<double>(c) + 0.5) / static_cast<double>(coins) < p0
                                               ? std::size_t{0}
                                               : std::size_t{1};
                                  });
}

/// Grid policy with independently uniform effort indices.
inline GridPolicy random_policy(SeededRng& rng, const TinyGameSpec& spec) {
  auto p = constant_policy(spec, 0);
  for (auto& round : p.effort)
    for (auto& g : round)
      g = std::min(spec.grid.size() - 1,
                   static_cast<std::size_t>(rng.uniform01() * static_cast<double>(spec.grid.size())));
  return p;
}

/// Copy of `policy` with one uniformly chosen cell moved to a different
/// grid level.
inline GridPolicy deviate_once(SeededRng& rng, const TinyGameSpec& spec, GridPolicy policy) {
  if (spec.grid.size() < 2) throw DomainError("deviation needs at least two grid levels");
  const auto t = std::min(spec.horizon() - 1,
                          static_cast<std::size_t>(rng.uniform01() * static_cast<double>(spec.horizon())));
  const auto n = spec.prefixes_at(t);
  const auto code = std::min(n - 1, static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n)));
  const auto shift = 1 + std::min(spec.grid.size() - 2,
                                  static_cast<std::size_t>(rng.uniform01() * static_cast<double>(spec.grid.size() - 1)));
  auto& cell = policy.effort[t][code];
  cell = (cell + shift) % spec.grid.size();
  return policy;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

/// Sampled estimate of exact_utility.
inline MonteCarloEstimate monte_carlo_utility(const TinyGameSpec& spec, const PolicyProfile& profile, std::size_t i,
                                              std::uint64_t samples, std::uint64_t seed) {
  spec.validate();
  validate_profile(spec, profile);
  SeededRng rng(seed, streams::kOutcome);
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t n = 0; n < samples; ++n) {
    PrincipalHistory h;
    std::size_t code = 0, scale = 1;
    double u = 0.0;
    for (std::size_t t = 0; t < spec.horizon(); ++t) {
      const std::size_t y = sample(spec.state_dists[t], rng);
      const auto c = std::min(spec.coins() - 1,
                              static_cast<std::size_t>(rng.uniform01() * static_cast<double>(spec.coins())));
      const std::size_t sel = spec.mechanism.select(h, c);
      if (sel == spec.num_agents()) {
        h.push_back({sel, std::nullopt});
      } else {
        const double a = spec.grid[profile[sel].effort[t][code]];
        const auto probs = spec.model.probabilities(sel, a, y);
        const std::size_t o = sample_with_uniform(normalize(probs), rng.uniform01());
        if (sel == i) u += spec.contract.pay(spec.model.return_of(o)) - spec.costs[sel](a);
        h.push_back({sel, o});
      }
      code += (y * spec.coins() + c) * scale;
      scale *= spec.step_values();
    }
    sum += u;
    sum_sq += u * u;
  }
  MonteCarloEstimate e;
  e.samples = samples;
  const auto n = static_cast<double>(samples);
  e.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * e.mean * e.mean) / (n - 1.0));
  e.standard_error = std::sqrt(var / n);
  return e;
}

}  // namespace monocontract::desk
