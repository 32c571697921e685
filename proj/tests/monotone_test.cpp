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

#include "monocontract/monotone.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "monocontract/appendix_b.hpp"
#include "monocontract/blum_mansour.hpp"
#include "monocontract/exp_weights.hpp"

namespace monocontract {
namespace {

TEST(PerturbationPairTest, PerturbedLowersOneCell) {
  PerturbationPair pair{{{0.5, 0.5}, {0.2, 0.7}}, 1, 1, 0.3};
  const auto p = pair.perturbed();
  EXPECT_DOUBLE_EQ(p[1][1], 0.4);
  EXPECT_EQ(p[0], pair.base[0]);
  EXPECT_EQ(p[1][0], 0.2);
}

TEST(PerturbationPairTest, Validation) {
  EXPECT_THROW((PerturbationPair{{}, 0, 0, 0.1}.validate()), DomainError);
  EXPECT_THROW((PerturbationPair{{{0.1, 0.2}}, 1, 0, 0.1}.validate()), DomainError);
  EXPECT_THROW((PerturbationPair{{{0.1, 0.2}}, 0, 2, 0.1}.validate()), DomainError);
  EXPECT_THROW((PerturbationPair{{{0.1, 0.2}}, 0, 0, -0.1}.validate()), DomainError);
}

TEST(FullInfoMonotone, ExpWeightsIsMonotoneOnRandomPairs) {
  SeededRng rng(101, streams::kData);
  for (int rep = 0; rep < 300; ++rep) {
    const auto pair = random_perturbation_pair(rng, 30, 5, LossRange{-1.0, 1.0});
    const auto v = check_full_info([&] { return ExpWeights(pair.num_arms(), 0.5); }, pair, 1e-12);
    EXPECT_TRUE(v.monotone) << "rep " << rep;
  }
}

TEST(FullInfoMonotone, ViolationIndicesAreOneBased) {
  // A learner that deliberately moves away from the improved arm.
  struct Contrarian {
    Distribution d = Distribution::uniform(2);
    std::size_t num_arms() const { return 2; }
    const Distribution& distribution() const { return d; }
    const Distribution& observe(std::span<const double> l) {
      d = l[0] < l[1] ? Distribution::point_mass(2, 1) : Distribution::point_mass(2, 0);
      return d;
    }
  };
  PerturbationPair pair{{{0.5, 0.4}, {0.5, 0.4}, {0.5, 0.4}}, 1, 0, 0.3};
  const auto v = check_full_info([] { return Contrarian{}; }, pair, 1e-12);
  EXPECT_FALSE(v.monotone);
  ASSERT_EQ(v.violating_rounds.size(), 1u);
  EXPECT_EQ(v.violating_rounds[0].round, 2u);
  EXPECT_EQ(v.violating_rounds[0].prob_base, 1.0);
  EXPECT_EQ(v.violating_rounds[0].prob_perturbed, 0.0);
  EXPECT_EQ(v.max_violation, 1.0);
}

// Published counterexample ------------------------------------------------------

TEST(AppendixB, GoldenTableReproduces) {
  const auto rep = appendix_b::reproduce();
  EXPECT_TRUE(rep.golden_ok());
  EXPECT_EQ(rep.cells_checked, 90u);
  EXPECT_LT(rep.max_abs_error, 1e-6);
}

TEST(AppendixB, BlumMansourViolatesMonotonicityAtTheEnd) {
  const auto rep = appendix_b::reproduce();
  EXPECT_FALSE(rep.verdict.monotone);
  ASSERT_FALSE(rep.verdict.violating_rounds.empty());
  std::vector<std::size_t> rounds;
  for (const auto& v : rep.verdict.violating_rounds) rounds.push_back(v.round);
  EXPECT_NE(std::find(rounds.begin(), rounds.end(), 99u), rounds.end());
  EXPECT_NE(std::find(rounds.begin(), rounds.end(), 100u), rounds.end());
  EXPECT_NEAR(rep.l2[99][0] - rep.l1[99][0], -1.44649313e-4, 1e-9);
}

TEST(AppendixB, ExpWeightsOnTheSameSequencesIsMonotone) {
  const auto v = check_full_info([] { return ExpWeights(3, appendix_b::kEta); }, appendix_b::perturbation(), 1e-12);
  EXPECT_TRUE(v.monotone);
}

TEST(AppendixB, FileFixtureEqualsBuiltin) {
  const auto file = appendix_b::load_fixture(std::string(MONOCONTRACT_DATA_DIR) + "/appendix_b_golden.txt");
  const auto builtin = appendix_b::builtin_fixture();
  EXPECT_EQ(file.eta, builtin.eta);
  EXPECT_EQ(file.tolerance, builtin.tolerance);
  ASSERT_EQ(file.matrices.size(), builtin.matrices.size());
  for (const auto& [name, rows] : builtin.matrices) {
    ASSERT_EQ(file.matrices.at(name).size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(file.matrices.at(name)[i].round, rows[i].round);
      EXPECT_EQ(file.matrices.at(name)[i].values, rows[i].values);
    }
  }
}

TEST(AppendixB, TamperedFixtureIsDetected) {
  auto fx = appendix_b::builtin_fixture();
  fx.matrices.at("l1").front().values[0] += 1e-4;
  const auto rep = appendix_b::reproduce(fx);
  EXPECT_FALSE(rep.golden_ok());
  ASSERT_EQ(rep.mismatches.size(), 1u);
  EXPECT_EQ(rep.mismatches[0].matrix, "l1");
}

TEST(AppendixB, MalformedFixtureThrows) {
  EXPECT_THROW(appendix_b::parse_fixture("format 2\n"), ConfigError);
  EXPECT_THROW(appendix_b::parse_fixture("format 1\nmatrix l1\n1 0.1 0.2\nend\n"), ConfigError);
  EXPECT_THROW(appendix_b::load_fixture("/nonexistent/golden.txt"), ConfigError);
}

}  // namespace
}  // namespace monocontract
