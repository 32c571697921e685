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

#include "monocontract/desk.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "support/desk_fixtures.hpp"

namespace monocontract::desk {
namespace {

using monocontract::testing::binary_model;
using monocontract::testing::random_tiny_spec;

TinyGameSpec one_agent_spec(std::size_t horizon, double alpha, double gamma) {
  TinyGameSpec s;
  s.model = binary_model({{0.0}}, {{1.0}});
  s.contract = Contract::linear(alpha);
  s.costs = {Cost::quadratic(gamma)};
  s.state_dists.assign(horizon, Distribution::point_mass(1, 0));
  s.grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  s.mechanism = TinyMechanism::constant(1, 0);
  return s;
}

TEST(DeskUtility, SingleRoundClosedForm) {
  const auto s = one_agent_spec(1, 0.6, 0.4);
  for (std::size_t g = 0; g < s.grid.size(); ++g) {
    const double a = s.grid[g];
    EXPECT_NEAR(exact_utility(s, {constant_policy(s, g)}, 0), 0.6 * a - 0.4 * a * a, 1e-15);
  }
}

TEST(DeskUtility, SymmetricAgentsEarnTheSame) {
  TinyGameSpec s;
  s.model = binary_model({{0.2, 0.4}, {0.2, 0.4}}, {{0.5, 0.3}, {0.5, 0.3}});
  s.contract = Contract::linear(0.5);
  s.costs = {Cost::quadratic(0.3), Cost::quadratic(0.3)};
  s.state_dists.assign(3, Distribution::from_probs({0.4, 0.6}));
  s.grid = {0.0, 0.5, 1.0};
  // Fair coin picks the agent; the rule ignores history.
  s.mechanism = TinyMechanism::from_rule(2, 2, 3, 2, [](const PrincipalHistory&, std::size_t c) { return c; });
  const PolicyProfile prof{constant_policy(s, 1), constant_policy(s, 1)};
  EXPECT_NEAR(exact_utility(s, prof, 0), exact_utility(s, prof, 1), 1e-15);
}

TEST(DeskUtility, MatchesMonteCarloWithinThreeStandardErrors) {
  SeededRng rng(8, streams::kData);
  for (int rep = 0; rep < 3; ++rep) {
    const auto s = random_tiny_spec(rng, 3, 2);
    const PolicyProfile prof{random_policy(rng, s), random_policy(rng, s)};
    for (std::size_t i = 0; i < 2; ++i) {
      const double exact = exact_utility(s, prof, i);
      const auto mc = monte_carlo_utility(s, prof, i, 1'000'000, 100 + rep);
      EXPECT_LT(std::abs(mc.mean - exact), 3.0 * mc.standard_error) << "rep " << rep << " agent " << i;
    }
  }
}

TEST(DeskUtility, UndefinedPrefixIsAConfigError) {
  const auto s = one_agent_spec(2, 0.5, 0.2);
  auto p = constant_policy(s, 1);
  p.effort[1].clear();
  EXPECT_THROW(exact_utility(s, {p}, 0), ConfigError);
  auto q = constant_policy(s, 9);
  EXPECT_THROW(exact_utility(s, {q}, 0), ConfigError);
}

TEST(DeskUtility, TableMissingAnEntryIsAConfigError) {
  auto s = one_agent_spec(2, 0.5, 0.2);
  TinyMechanism::Table table;
  table[{PrincipalHistory{}, 0}] = 0;
  s.mechanism = TinyMechanism::tabulated(1, 1, table);
  EXPECT_THROW(exact_utility(s, {constant_policy(s, 1)}, 0), ConfigError);
}

TEST(DeskSpec, Limits) {
  auto s = one_agent_spec(4, 0.5, 0.2);
  EXPECT_THROW(s.validate(), ConfigError);
  s = one_agent_spec(2, 0.5, 0.2);
  s.grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  EXPECT_THROW(s.validate(), ConfigError);
  s.grid = {0.0, 0.5, 0.5};
  EXPECT_THROW(s.validate(), ConfigError);
  s = one_agent_spec(3, 0.5, 0.2);
  s.mechanism = TinyMechanism::from_rule(1, 50, 3, 2, [](const PrincipalHistory&, std::size_t) { return 0; });
  EXPECT_THROW(s.validate(), ConfigError);  // (1 * 50 * 2)^3 transcripts
}

TEST(DeskPrefix, CodesRoundTrip) {
  SeededRng rng(2, streams::kData);
  const auto s = random_tiny_spec(rng, 3, 3);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t code = 0; code < s.prefixes_at(t); ++code)
      EXPECT_EQ(prefix_code(s, decode_prefix(s, t, code)), code);
}

// Subgame decomposition -------------------------------------------------------

TEST(DeskSubgame, RandomSinglePrefixDeviations) {
  SeededRng rng(31, streams::kData);
  for (int rep = 0; rep < 60; ++rep) {
    const auto s = random_tiny_spec(rng, 1 + rep % 3, 1 + rep % 2);
    const PolicyProfile base{random_policy(rng, s), random_policy(rng, s)};
    auto dev = base;
    const std::size_t j = rep % 2;
    const std::size_t t = static_cast<std::size_t>(rng.uniform01() * s.horizon());
    const std::size_t code = static_cast<std::size_t>(rng.uniform01() * s.prefixes_at(t));
    auto& cell = dev[j].effort[t][code];
    cell = (cell + 1 + static_cast<std::size_t>(rng.uniform01() * 3)) % s.grid.size();
    for (std::size_t i = 0; i < 2; ++i) {
      const auto r = check_subgame_decomposition(s, base, dev, i);
      EXPECT_LE(r.residual, 1e-12) << "rep " << rep;
      EXPECT_EQ(r.round, t);
      EXPECT_EQ(r.deviating_agent, j);
    }
  }
}

TEST(DeskSubgame, UnreachablePrefixChangesNothing) {
  SeededRng rng(32, streams::kData);
  auto s = random_tiny_spec(rng, 2, 1);
  s.state_dists[0] = Distribution::from_probs({1.0, 0.0});
  const PolicyProfile base{random_policy(rng, s), random_policy(rng, s)};
  auto dev = base;
  // Round-1 prefix with state 1 in round 0.
  const std::size_t code = prefix_code(s, {{1, 0}});
  dev[0].effort[1][code] = (dev[0].effort[1][code] + 1) % s.grid.size();
  const auto r = check_subgame_decomposition(s, base, dev, 0);
  EXPECT_EQ(r.prefix_probability, 0.0);
  EXPECT_EQ(r.delta_total, 0.0);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(DeskSubgame, CertainPrefixEqualsSubgameChange) {
  SeededRng rng(33, streams::kData);
  const auto s = random_tiny_spec(rng, 3, 2);
  const PolicyProfile base{random_policy(rng, s), random_policy(rng, s)};
  auto dev = base;
  dev[1].effort[0][0] = (dev[1].effort[0][0] + 2) % s.grid.size();
  const auto r = check_subgame_decomposition(s, base, dev, 1);
  EXPECT_EQ(r.prefix_probability, 1.0);
  EXPECT_NEAR(r.delta_total, r.delta_subgame, 1e-15);
}

TEST(DeskSubgame, MultiPrefixDeviationIsRejected) {
  SeededRng rng(34, streams::kData);
  const auto s = random_tiny_spec(rng, 2, 1);
  const PolicyProfile base{random_policy(rng, s), random_policy(rng, s)};
  auto dev = base;
  dev[0].effort[0][0] = (dev[0].effort[0][0] + 1) % s.grid.size();
  dev[0].effort[1][1] = (dev[0].effort[1][1] + 1) % s.grid.size();
  EXPECT_THROW(check_subgame_decomposition(s, base, dev, 0), DomainError);
  EXPECT_THROW(check_subgame_decomposition(s, base, base, 0), DomainError);
}

// Myopic optimality under constant selection ---------------------------------

TEST(DeskMyopic, ZeroCostAgentWorksFullOut) {
  auto s = one_agent_spec(3, 0.5, 0.0);
  EXPECT_EQ(myopic_grid_index(s, 0, 0), s.grid.size() - 1);
  const auto v = check_myopic_under_constant(s, 0);
  EXPECT_TRUE(v.holds);
  EXPECT_NEAR(v.myopic_utility, 1.5, 1e-15);
}

TEST(DeskMyopic, InteriorOptimumOffTheGrid) {
  // alpha / (2 gamma) = 0.4 lies between grid levels 0.25 and 0.5.
  TinyGameSpec s;
  s.model = binary_model({{0.1, 0.3}}, {{0.8, 0.6}});
  s.contract = Contract::linear(0.8);
  s.costs = {Cost::quadratic(1.0)};
  s.state_dists.assign(3, Distribution::from_probs({0.5, 0.5}));
  s.grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  s.mechanism = TinyMechanism::constant(1, 0);
  const auto v = check_myopic_under_constant(s, 0);
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.policies_enumerated, 78'125u);
  EXPECT_NEAR(v.best_utility, v.myopic_utility, 1e-12);
}

TEST(DeskMyopic, RoundsFactorUnderConstantSelection) {
  const auto two = one_agent_spec(2, 0.7, 0.5);
  const auto one = one_agent_spec(1, 0.7, 0.5);
  for (std::size_t g0 = 0; g0 < two.grid.size(); ++g0)
    for (std::size_t g1 = 0; g1 < two.grid.size(); ++g1) {
      auto p = constant_policy(two, g0);
      p.effort[1][0] = g1;
      const double joint = exact_utility(two, {p}, 0);
      const double split = exact_utility(one, {constant_policy(one, g0)}, 0) +
                           exact_utility(one, {constant_policy(one, g1)}, 0);
      EXPECT_NEAR(joint, split, 1e-15);
    }
}

TEST(DeskMyopic, RequiresConstantSelectionOfTheAgent) {
  auto s = one_agent_spec(1, 0.5, 0.2);
  s.mechanism = TinyMechanism::constant(1, 1);
  EXPECT_THROW(check_myopic_under_constant(s, 0), DomainError);
}

TEST(DeskMyopic, RandomSpecsUnderConstantSelection) {
  SeededRng rng(35, streams::kData);
  for (int rep = 0; rep < 10; ++rep) {
    auto s = random_tiny_spec(rng, 1 + rep % 3, 1);
    const std::size_t i = rep % 2;
    s.mechanism = TinyMechanism::constant(2, i);
    EXPECT_TRUE(check_myopic_under_constant(s, i).holds) << "rep " << rep;
  }
}

// Effort dominance under a monotone mechanism ---------------------------------

TEST(DeskIncentive, BestResponseRoundOneEffortIsAtLeastMyopicOnSuite) {
  SeededRng rng(36, streams::kData);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = random_tiny_spec(rng, 2, 2);
    const PolicyProfile prof{myopic_policy(s, 0), myopic_policy(s, 1)};
    for (std::size_t i = 0; i < 2; ++i) {
      const auto c = check_agent_incentive(s, prof, i);
      EXPECT_TRUE(c.holds) << "rep " << rep << " agent " << i << ": " << c.best_response_effort << " < "
                           << c.myopic_effort;
    }
  }
}

}  // namespace
}  // namespace monocontract::desk
