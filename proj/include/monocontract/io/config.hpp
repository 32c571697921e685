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
/// Experiment configuration: JSON schema, strict parsing with field-path
/// diagnostics, and canonical serialization.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "monocontract/contracting/model.hpp"
#include "monocontract/core.hpp"
#include "monocontract/learner_spec.hpp"

namespace monocontract::io {

using Json = nlohmann::json;

struct SeedSpec {
  std::uint64_t base = 1;
  std::size_t replicates = 1;
  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

struct OutputSpec {
  std::string dir = "out";
  std::string prefix;  // empty: the experiment kind
  bool csv = true;
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RegretBenchSpec {
  std::size_t arms = 3;
  std::size_t horizon = 1000;
  std::string suite = "iid";        // iid | adversarial | switching
  std::string feedback = "bandit";  // bandit | full
  friend bool operator==(const RegretBenchSpec&, const RegretBenchSpec&) = default;
};

struct MonotoneCheckSpec {
  std::string learner = "mw";  // mw | treeswap | bandit-mw
  std::size_t pairs = 1000;
  std::size_t max_horizon = 200;
  std::size_t max_arms = 5;
  double tolerance = 1e-10;
  double eta = 0.5;
  double epsilon = 0.5;  // bandit-mw only
  friend bool operator==(const MonotoneCheckSpec&, const MonotoneCheckSpec&) = default;
};

struct ContractSpec {
  std::string type = "linear";  // linear | piecewise
  double alpha = 0.5;
  std::vector<contracting::Knot> knots;
  friend bool operator==(const ContractSpec&, const ContractSpec&) = default;
};

struct CostSpec {
  std::string type = "quadratic";  // linear | quadratic | piecewise
  double coef = 0.0;
  std::vector<contracting::Knot> knots;
  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

struct PolicySpec {
  std::string kind = "myopic";  // myopic | boosted | fixed
  double value = 0.0;           // boost or fixed effort
  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

struct AgentConfig {
  CostSpec cost;
  std::vector<double> belief;  // empty: the agent knows each round's state
  PolicySpec policy;
  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

struct OutcomeSpec {
  std::vector<double> returns;
  contracting::Tensor3 slopes, intercepts;
  friend bool operator==(const OutcomeSpec&, const OutcomeSpec&) = default;
};

struct StateSpec {
  std::vector<std::size_t> sequence;  // explicit states, or
  std::vector<double> iid;            // per-round distribution
  std::optional<std::uint64_t> seed;  // sampling seed; defaults to the run seed
  friend bool operator==(const StateSpec&, const StateSpec&) = default;
};

struct MechanismSpec {
  std::string kind = "bandit";  // bandit | constant
  std::size_t arm = 0;
  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;
};

struct GameConfig {
  std::size_t horizon = 0;
  ContractSpec contract;
  OutcomeSpec outcomes;
  std::vector<AgentConfig> agents;
  StateSpec states;
  MechanismSpec mechanism;
  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

struct TableEntry {
  std::vector<std::pair<std::size_t, std::optional<std::size_t>>> history;  // (arm, outcome)
  std::size_t coin = 0;
  std::size_t select = 0;
  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

struct DeskMechanismSpec {
  std::string kind = "constant";  // constant | table | score
  std::size_t arm = 0;
  std::size_t coins = 1;
  double beta = 0.5;
  std::vector<TableEntry> entries;
  friend bool operator==(const DeskMechanismSpec&, const DeskMechanismSpec&) = default;
};

struct DeskConfig {
  OutcomeSpec outcomes;
  ContractSpec contract;
  std::vector<CostSpec> costs;
  std::vector<std::vector<double>> state_dists;
  std::vector<double> grid;
  DeskMechanismSpec mechanism;
  std::size_t deviations = 100;
  std::uint64_t mc_samples = 1'000'000;
  friend bool operator==(const DeskConfig&, const DeskConfig&) = default;
};

struct AppendixBConfig {
  std::string fixture;  // empty: built-in copy of the golden table
  friend bool operator==(const AppendixBConfig&, const AppendixBConfig&) = default;
};

struct ExperimentConfig {
  std::string experiment;
  SeedSpec seeds;
  OutputSpec output;
  std::size_t threads = 0;  // 0: hardware concurrency
  LearnerSpec learner;
  std::optional<RegretBenchSpec> regret_bench;
  std::optional<MonotoneCheckSpec> monotone_check;
  std::optional<GameConfig> game;
  std::optional<DeskConfig> desk;
  std::optional<AppendixBConfig> appendix_b;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"regret-bench",   "monotone-check",   "simulate-game1",
                                          "simulate-game2", "repro-appendix-b", "desk-eq"};
  return k;
}

// Reading -------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + (path.empty() ? std::string("<root>") : path) + ": " + what);
}

template <typename T>
T as(const Json& j, const std::string& path);

template <>
inline double as<double>(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

template <>
inline std::uint64_t as<std::uint64_t>(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "size_t fields are read as 64-bit integers");

template <>
inline std::string as<std::string>(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

template <>
inline bool as<bool>(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

template <typename T>
std::vector<T> as_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<T> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as<T>(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

/// Object view that records which keys were read and rejects the rest.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& sub(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(at(key), "missing required field");
    return j_.at(key);
  }

  template <typename T>
  T req(const std::string& key) {
    return as<T>(sub(key), at(key));
  }

  template <typename T>
  T opt(const std::string& key, T fallback) {
    seen_.insert(key);
    return j_.contains(key) ? as<T>(j_.at(key), at(key)) : fallback;
  }

  template <typename T>
  std::vector<T> req_vector(const std::string& key) {
    return as_vector<T>(sub(key), at(key));
  }

  template <typename T>
  std::vector<T> opt_vector(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? as_vector<T>(j_.at(key), at(key)) : std::vector<T>{};
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown field");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::vector<contracting::Knot> read_knots(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [x, y] pairs");
  std::vector<contracting::Knot> k;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto p = path + "[" + std::to_string(i) + "]";
    const auto xy = as_vector<double>(j[i], p);
    if (xy.size() != 2) fail(p, "expected [x, y]");
    k.push_back({xy[0], xy[1]});
  }
  return k;
}

inline contracting::Tensor3 read_tensor(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a [agent][outcome][state] array");
  contracting::Tensor3 t;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto pi = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) fail(pi, "expected an array");
    std::vector<std::vector<double>> m;
    for (std::size_t o = 0; o < j[i].size(); ++o)
      m.push_back(as_vector<double>(j[i][o], pi + "[" + std::to_string(o) + "]"));
    t.push_back(std::move(m));
  }
  return t;
}

inline LearnerSpec read_learner(Fields f) {
  LearnerSpec s;
  s.algorithm = f.opt<std::string>("algorithm", s.algorithm);
  s.eta = f.opt<double>("eta", s.eta);
  s.epsilon = f.opt<double>("epsilon", s.epsilon);
  s.depth = f.opt<std::size_t>("depth", s.depth);
  f.finish();
  try {
    validate(s);
  } catch (const ConfigError& e) {
    fail("learner", e.what());
  }
  return s;
}

inline ContractSpec read_contract(Fields f) {
  ContractSpec c;
  c.type = f.opt<std::string>("type", c.type);
  if (c.type == "linear") {
    c.alpha = f.req<double>("alpha");
  } else if (c.type == "piecewise") {
    c.knots = read_knots(f.sub("knots"), f.at("knots"));
  } else {
    fail(f.at("type"), "expected linear or piecewise");
  }
  f.finish();
  return c;
}

inline CostSpec read_cost(Fields f) {
  CostSpec c;
  c.type = f.opt<std::string>("type", c.type);
  if (c.type == "linear" || c.type == "quadratic") {
    c.coef = f.req<double>("coef");
  } else if (c.type == "piecewise") {
    c.knots = read_knots(f.sub("knots"), f.at("knots"));
  } else {
    fail(f.at("type"), "expected linear, quadratic or piecewise");
  }
  f.finish();
  return c;
}

inline OutcomeSpec read_outcomes(Fields f) {
  OutcomeSpec o;
  o.returns = f.req_vector<double>("returns");
  o.slopes = read_tensor(f.sub("slopes"), f.at("slopes"));
  o.intercepts = read_tensor(f.sub("intercepts"), f.at("intercepts"));
  f.finish();
  return o;
}

inline PolicySpec read_policy(Fields f) {
  PolicySpec p;
  p.kind = f.opt<std::string>("kind", p.kind);
  if (p.kind == "boosted") p.value = f.req<double>("delta");
  else if (p.kind == "fixed") p.value = f.req<double>("effort");
  else if (p.kind != "myopic") fail(f.at("kind"), "expected myopic, boosted or fixed");
  f.finish();
  return p;
}

inline GameConfig read_game(Fields f) {
  GameConfig g;
  g.horizon = f.req<std::size_t>("horizon");
  if (g.horizon == 0) fail(f.at("horizon"), "must be positive");
  g.contract = read_contract(Fields(f.sub("contract"), f.at("contract")));
  g.outcomes = read_outcomes(Fields(f.sub("outcomes"), f.at("outcomes")));
  const Json& agents = f.sub("agents");
  if (!agents.is_array() || agents.empty()) fail(f.at("agents"), "expected a non-empty array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Fields a(agents[i], f.at("agents") + "[" + std::to_string(i) + "]");
    AgentConfig ac;
    ac.cost = read_cost(Fields(a.sub("cost"), a.at("cost")));
    ac.belief = a.opt_vector<double>("belief");
    if (a.has("policy")) ac.policy = read_policy(Fields(a.sub("policy"), a.at("policy")));
    a.finish();
    g.agents.push_back(std::move(ac));
  }
  Fields s(f.sub("states"), f.at("states"));
  g.states.sequence = s.opt_vector<std::size_t>("sequence");
  g.states.iid = s.opt_vector<double>("iid");
  if (s.has("seed")) g.states.seed = s.req<std::uint64_t>("seed");
  s.finish();
  if (g.states.sequence.empty() == g.states.iid.empty())
    fail(f.at("states"), "give exactly one of 'sequence' or 'iid'");
  if (!g.states.sequence.empty() && g.states.sequence.size() != g.horizon)
    fail(f.at("states.sequence"), "length differs from horizon");
  if (f.has("mechanism")) {
    Fields m(f.sub("mechanism"), f.at("mechanism"));
    g.mechanism.kind = m.opt<std::string>("kind", g.mechanism.kind);
    if (g.mechanism.kind == "constant") g.mechanism.arm = m.req<std::size_t>("arm");
    else if (g.mechanism.kind != "bandit") fail(m.at("kind"), "expected bandit or constant");
    m.finish();
  }
  f.finish();
  return g;
}

inline DeskConfig read_desk(Fields f) {
  DeskConfig d;
  d.outcomes = read_outcomes(Fields(f.sub("outcomes"), f.at("outcomes")));
  d.contract = read_contract(Fields(f.sub("contract"), f.at("contract")));
  const Json& costs = f.sub("costs");
  if (!costs.is_array()) fail(f.at("costs"), "expected an array");
  for (std::size_t i = 0; i < costs.size(); ++i)
    d.costs.push_back(read_cost(Fields(costs[i], f.at("costs") + "[" + std::to_string(i) + "]")));
  const Json& sd = f.sub("state_dists");
  if (!sd.is_array()) fail(f.at("state_dists"), "expected an array");
  for (std::size_t t = 0; t < sd.size(); ++t)
    d.state_dists.push_back(as_vector<double>(sd[t], f.at("state_dists") + "[" + std::to_string(t) + "]"));
  d.grid = f.req_vector<double>("grid");
  Fields m(f.sub("mechanism"), f.at("mechanism"));
  d.mechanism.kind = m.req<std::string>("kind");
  if (d.mechanism.kind == "constant") {
    d.mechanism.arm = m.req<std::size_t>("arm");
  } else if (d.mechanism.kind == "score") {
    d.mechanism.coins = m.req<std::size_t>("coins");
    d.mechanism.beta = m.req<double>("beta");
  } else if (d.mechanism.kind == "table") {
    d.mechanism.coins = m.req<std::size_t>("coins");
    const Json& entries = m.sub("entries");
    if (!entries.is_array()) fail(m.at("entries"), "expected an array");
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto pe = m.at("entries") + "[" + std::to_string(e) + "]";
      Fields ef(entries[e], pe);
      TableEntry te;
      const Json& h = ef.sub("history");
      if (!h.is_array()) fail(ef.at("history"), "expected an array of [arm, outcome] pairs");
      for (std::size_t s = 0; s < h.size(); ++s) {
        const auto ps = ef.at("history") + "[" + std::to_string(s) + "]";
        if (!h[s].is_array() || h[s].size() != 2) fail(ps, "expected [arm, outcome-or-null]");
        const auto arm = as<std::size_t>(h[s][0], ps + "[0]");
        std::optional<std::size_t> o;
        if (!h[s][1].is_null()) o = as<std::size_t>(h[s][1], ps + "[1]");
        te.history.emplace_back(arm, o);
      }
      te.coin = ef.req<std::size_t>("coin");
      te.select = ef.req<std::size_t>("select");
      ef.finish();
      d.mechanism.entries.push_back(std::move(te));
    }
  } else {
    fail(m.at("kind"), "expected constant, score or table");
  }
  m.finish();
  d.deviations = f.opt<std::size_t>("deviations", d.deviations);
  d.mc_samples = f.opt<std::uint64_t>("mc_samples", d.mc_samples);
  f.finish();
  return d;
}

/// 1-based line and column of a byte offset.
inline std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line, col = 1;
    else ++col;
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& j) {
  using detail::Fields;
  Fields f(j, "");
  ExperimentConfig c;
  c.experiment = f.req<std::string>("experiment");
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.experiment) == kinds.end())
    detail::fail("experiment", "unknown experiment kind '" + c.experiment + "'");
  if (f.has("seeds")) {
    Fields s(f.sub("seeds"), "seeds");
    c.seeds.base = s.opt<std::uint64_t>("base", c.seeds.base);
    c.seeds.replicates = s.opt<std::size_t>("replicates", c.seeds.replicates);
    if (c.seeds.replicates == 0) detail::fail("seeds.replicates", "must be positive");
    s.finish();
  }
  if (f.has("output")) {
    Fields o(f.sub("output"), "output");
    c.output.dir = o.opt<std::string>("dir", c.output.dir);
    c.output.prefix = o.opt<std::string>("prefix", c.output.prefix);
    c.output.csv = o.opt<bool>("csv", c.output.csv);
    o.finish();
  }
  c.threads = f.opt<std::size_t>("threads", c.threads);
  if (f.has("learner")) c.learner = detail::read_learner(Fields(f.sub("learner"), "learner"));
  if (f.has("regret_bench")) {
    Fields r(f.sub("regret_bench"), "regret_bench");
    RegretBenchSpec s;
    s.arms = r.opt<std::size_t>("arms", s.arms);
    s.horizon = r.opt<std::size_t>("horizon", s.horizon);
    s.suite = r.opt<std::string>("suite", s.suite);
    s.feedback = r.opt<std::string>("feedback", s.feedback);
    r.finish();
    if (s.arms < 2) detail::fail("regret_bench.arms", "need at least two arms");
    if (s.horizon == 0) detail::fail("regret_bench.horizon", "must be positive");
    if (s.suite != "iid" && s.suite != "adversarial" && s.suite != "switching")
      detail::fail("regret_bench.suite", "expected iid, adversarial or switching");
    if (s.feedback != "bandit" && s.feedback != "full") detail::fail("regret_bench.feedback", "expected bandit or full");
    c.regret_bench = s;
  }
  if (f.has("monotone_check")) {
    Fields m(f.sub("monotone_check"), "monotone_check");
    MonotoneCheckSpec s;
    s.learner = m.opt<std::string>("learner", s.learner);
    s.pairs = m.opt<std::size_t>("pairs", s.pairs);
    s.max_horizon = m.opt<std::size_t>("max_horizon", s.max_horizon);
    s.max_arms = m.opt<std::size_t>("max_arms", s.max_arms);
    s.tolerance = m.opt<double>("tolerance", s.tolerance);
    s.eta = m.opt<double>("eta", s.eta);
    s.epsilon = m.opt<double>("epsilon", s.epsilon);
    m.finish();
    if (s.learner != "mw" && s.learner != "treeswap" && s.learner != "bandit-mw")
      detail::fail("monotone_check.learner", "expected mw, treeswap or bandit-mw");
    if (s.max_horizon == 0 || s.max_arms < 2) detail::fail("monotone_check", "need max_horizon >= 1 and max_arms >= 2");
    c.monotone_check = s;
  }
  if (f.has("game")) c.game = detail::read_game(Fields(f.sub("game"), "game"));
  if (f.has("desk")) c.desk = detail::read_desk(Fields(f.sub("desk"), "desk"));
  if (f.has("appendix_b")) {
    Fields a(f.sub("appendix_b"), "appendix_b");
    c.appendix_b = AppendixBConfig{a.opt<std::string>("fixture", "")};
    a.finish();
  }
  f.finish();

  const auto& e = c.experiment;
  if (e == "regret-bench" && !c.regret_bench) detail::fail("regret_bench", "required for regret-bench");
  if (e == "monotone-check" && !c.monotone_check) detail::fail("monotone_check", "required for monotone-check");
  if ((e == "simulate-game1" || e == "simulate-game2") && !c.game) detail::fail("game", "required for " + e);
  if (e == "desk-eq" && !c.desk) detail::fail("desk", "required for desk-eq");
  if (e == "repro-appendix-b" && !c.appendix_b) c.appendix_b = AppendixBConfig{};
  if (c.output.prefix.empty()) c.output.prefix = e;
  return c;
}

/// Parses config text, reporting JSON syntax errors by line and column.
inline ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config: syntax error at " + detail::locate(text, e.byte) + ": " + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// Writing -------------------------------------------------------------------

namespace detail {

inline Json knots_json(const std::vector<contracting::Knot>& k) {
  Json a = Json::array();
  for (const auto& p : k) a.push_back({p.x, p.y});
  return a;
}

inline Json contract_json(const ContractSpec& c) {
  if (c.type == "linear") return {{"type", c.type}, {"alpha", c.alpha}};
  return {{"type", c.type}, {"knots", knots_json(c.knots)}};
}

inline Json cost_json(const CostSpec& c) {
  if (c.type == "piecewise") return {{"type", c.type}, {"knots", knots_json(c.knots)}};
  return {{"type", c.type}, {"coef", c.coef}};
}

inline Json outcomes_json(const OutcomeSpec& o) {
  return {{"returns", o.returns}, {"slopes", o.slopes}, {"intercepts", o.intercepts}};
}

inline Json policy_json(const PolicySpec& p) {
  if (p.kind == "boosted") return {{"kind", p.kind}, {"delta", p.value}};
  if (p.kind == "fixed") return {{"kind", p.kind}, {"effort", p.value}};
  return {{"kind", p.kind}};
}

}  // namespace detail

/// Canonical JSON: every field written, object keys sorted.
inline Json config_to_json(const ExperimentConfig& c) {
  using namespace detail;
  Json j;
  j["experiment"] = c.experiment;
  j["seeds"] = {{"base", c.seeds.base}, {"replicates", c.seeds.replicates}};
  j["output"] = {{"dir", c.output.dir}, {"prefix", c.output.prefix}, {"csv", c.output.csv}};
  j["threads"] = c.threads;
  j["learner"] = {{"algorithm", c.learner.algorithm},
                  {"eta", c.learner.eta},
                  {"epsilon", c.learner.epsilon},
                  {"depth", c.learner.depth}};
  if (c.regret_bench) {
    const auto& r = *c.regret_bench;
    j["regret_bench"] = {{"arms", r.arms}, {"horizon", r.horizon}, {"suite", r.suite}, {"feedback", r.feedback}};
  }
  if (c.monotone_check) {
    const auto& m = *c.monotone_check;
    j["monotone_check"] = {{"learner", m.learner},     {"pairs", m.pairs},         {"max_horizon", m.max_horizon},
                           {"max_arms", m.max_arms},   {"tolerance", m.tolerance}, {"eta", m.eta},
                           {"epsilon", m.epsilon}};
  }
  if (c.game) {
    const auto& g = *c.game;
    Json agents = Json::array();
    for (const auto& a : g.agents) {
      Json aj{{"cost", cost_json(a.cost)}, {"policy", policy_json(a.policy)}};
      if (!a.belief.empty()) aj["belief"] = a.belief;
      agents.push_back(aj);
    }
    Json states = Json::object();
    if (!g.states.sequence.empty()) states["sequence"] = g.states.sequence;
    if (!g.states.iid.empty()) states["iid"] = g.states.iid;
    if (g.states.seed) states["seed"] = *g.states.seed;
    Json mech{{"kind", g.mechanism.kind}};
    if (g.mechanism.kind == "constant") mech["arm"] = g.mechanism.arm;
    j["game"] = {{"horizon", g.horizon},     {"contract", contract_json(g.contract)},
                 {"outcomes", outcomes_json(g.outcomes)}, {"agents", agents},
                 {"states", states},         {"mechanism", mech}};
  }
  if (c.desk) {
    const auto& d = *c.desk;
    Json costs = Json::array();
    for (const auto& cs : d.costs) costs.push_back(cost_json(cs));
    Json mech{{"kind", d.mechanism.kind}};
    if (d.mechanism.kind == "constant") mech["arm"] = d.mechanism.arm;
    if (d.mechanism.kind == "score") mech["coins"] = d.mechanism.coins, mech["beta"] = d.mechanism.beta;
    if (d.mechanism.kind == "table") {
      mech["coins"] = d.mechanism.coins;
      Json entries = Json::array();
      for (const auto& e : d.mechanism.entries) {
        Json h = Json::array();
        for (const auto& [arm, o] : e.history) h.push_back({arm, o ? Json(*o) : Json(nullptr)});
        entries.push_back({{"history", h}, {"coin", e.coin}, {"select", e.select}});
      }
      mech["entries"] = entries;
    }
    j["desk"] = {{"outcomes", outcomes_json(d.outcomes)},
                 {"contract", contract_json(d.contract)},
                 {"costs", costs},
                 {"state_dists", d.state_dists},
                 {"grid", d.grid},
                 {"mechanism", mech},
                 {"deviations", d.deviations},
                 {"mc_samples", d.mc_samples}};
  }
  if (c.appendix_b) j["appendix_b"] = {{"fixture", c.appendix_b->fixture}};
  return j;
}

/// config_to_json without execution-only settings (output.dir, threads),
/// which do not affect results.
inline Json canonical_json(const ExperimentConfig& c) {
  Json j = config_to_json(c);
  j["output"].erase("dir");
  j.erase("threads");
  return j;
}

/// 16-hex-digit FNV-1a hash of the canonical JSON text.
inline std::string config_hash(const ExperimentConfig& c) {
  const std::uint64_t h = monocontract::detail::fnv1a(canonical_json(c).dump());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 0; i < 16; ++i) s[15 - i] = kHex[(h >> (4 * i)) & 0xF];
  return s;
}

// Conversion to model types ---------------------------------------------------

inline contracting::Contract make_contract(const ContractSpec& c) {
  return c.type == "linear" ? contracting::Contract::linear(c.alpha) : contracting::Contract::piecewise_concave(c.knots);
}

inline contracting::Cost make_cost(const CostSpec& c) {
  if (c.type == "linear") return contracting::Cost::linear(c.coef);
  if (c.type == "quadratic") return contracting::Cost::quadratic(c.coef);
  return contracting::Cost::piecewise(c.knots);
}

inline contracting::AgentPolicy make_policy(const PolicySpec& p) {
  if (p.kind == "boosted") return contracting::AgentPolicy::boosted(p.value);
  if (p.kind == "fixed") return contracting::AgentPolicy::fixed(p.value);
  return contracting::AgentPolicy::myopic();
}

inline contracting::OutcomeModel make_model(const OutcomeSpec& o) {
  return contracting::OutcomeModel(o.returns, o.slopes, o.intercepts);
}

}  // namespace monocontract::io
