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

#include "monocontract/experiments.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

namespace monocontract::experiments {
namespace {

ExperimentConfig load(const std::string& name) {
  return io::load_config(std::string(MONOCONTRACT_CONFIG_DIR) + "/" + name);
}

ExperimentConfig small_bench(std::size_t replicates, std::size_t threads) {
  auto c = io::parse_config(R"({"experiment": "regret-bench",
      "regret_bench": {"arms": 3, "horizon": 300, "suite": "adversarial"}})");
  c.seeds.replicates = replicates;
  c.threads = threads;
  return c;
}

ExperimentConfig small_game(const std::string& kind) {
  auto c = load("simulate_game1.json");
  c.experiment = kind;
  c.output.prefix = kind;
  c.game->horizon = 400;
  c.seeds.replicates = 3;
  return c;
}

const std::string* find_file(const RunOutput& out, const std::string& name) {
  for (const auto& [n, body] : out.files)
    if (n == name) return &body;
  return nullptr;
}

TEST(Format, EightSignificantDigits) {
  EXPECT_EQ(fmt8(1.0 / 3.0), "0.33333333");
  EXPECT_EQ(fmt8(-0.0), "0");
  EXPECT_EQ(fmt8(123456789.0), "1.2345679e+08");
}

TEST(LossSuites, RangesAndDeterminism) {
  for (const char* kind : {"iid", "switching", "adversarial"}) {
    LossSuite a(kind, 4, 100, 5), b(kind, 4, 100, 5);
    std::vector<std::size_t> plays;
    for (std::size_t t = 0; t < 100; ++t) {
      const auto la = a.next(t, plays), lb = b.next(t, plays);
      EXPECT_EQ(la, lb);
      for (double x : la) EXPECT_TRUE(x >= 0.0 && x <= 1.0);
      plays.push_back(t % 4);
    }
  }
}

TEST(LossSuites, AdversaryPunishesFrequentArm) {
  LossSuite s("adversarial", 3, 10, 1);
  const auto l = s.next(3, {2, 2, 1});
  EXPECT_EQ(l[2], 1.0);
  EXPECT_LE(l[0], 0.5);
}

TEST(Run, DeterministicAcrossThreadCounts) {
  const auto a = run_experiment(small_bench(4, 1));
  const auto b = run_experiment(small_bench(4, 3));
  EXPECT_EQ(a.record.dump(), b.record.dump());
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i], b.files[i]);
}

TEST(Run, SeedsAreConsecutive) {
  const auto out = run_experiment(small_bench(3, 1));
  const auto& runs = out.record.at("runs");
  ASSERT_EQ(runs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(runs[i].at("seed").get<std::uint64_t>(), 1 + i);
  EXPECT_NE(runs[0].at("rows_digest"), runs[1].at("rows_digest"));
}

TEST(Run, SummaryMatchesIndependentComputation) {
  const auto c = small_bench(1, 1);
  const auto out = run_experiment(c);
  const auto& run = out.record.at("runs")[0];
  std::vector<std::size_t> plays;
  LossMatrix losses;
  for (const auto& r : run.at("rows")) {
    plays.push_back(r.at("arm"));
    losses.push_back(r.at("losses").get<std::vector<double>>());
  }
  EXPECT_EQ(plays.size(), 300u);
  EXPECT_DOUBLE_EQ(run.at("summary").at("external_regret").get<double>(), external_regret(plays, losses).value);
  EXPECT_DOUBLE_EQ(run.at("summary").at("swap_regret").get<double>(), swap_regret(plays, losses).value);
  EXPECT_DOUBLE_EQ(run.at("summary").at("bound").get<double>(), bound_mono_bandit_mw(300, 3));
}

TEST(Run, CsvLayout) {
  const auto c = small_bench(1, 1);
  const auto out = run_experiment(c);
  const auto* csv = find_file(out, "regret-bench_seed1.csv");
  ASSERT_NE(csv, nullptr);
  std::istringstream in(*csv);
  std::string first, header, line, last;
  std::getline(in, first);
  std::getline(in, header);
  EXPECT_EQ(first, "# config_hash " + io::config_hash(c) + " seed 1");
  EXPECT_EQ(header + "\n", kCsvHeader);
  std::size_t n = 0;
  while (std::getline(in, line)) last = line, ++n;
  EXPECT_EQ(n, 300u);
  const auto& s = out.record.at("runs")[0].at("summary");
  const std::string tail = "," + fmt8(s.at("external_regret").get<double>()) + "," +
                           fmt8(s.at("swap_regret").get<double>());
  EXPECT_EQ(last.substr(last.size() - tail.size()), tail);
  EXPECT_NE(find_file(out, "regret-bench.json"), nullptr);
}

TEST(Run, CsvCanBeDisabled) {
  auto c = small_bench(1, 1);
  c.output.csv = false;
  const auto out = run_experiment(c);
  EXPECT_EQ(out.files.size(), 1u);
}

TEST(Verify, AcceptsFreshRecords) {
  for (const auto& c : {small_bench(2, 1), small_game("simulate-game1"), small_game("simulate-game2")}) {
    const auto out = run_experiment(c);
    const auto rep = verify_record(out.record);
    EXPECT_TRUE(rep.ok) << c.experiment << ": " << (rep.problems.empty() ? "" : rep.problems[0]);
  }
}

TEST(Verify, DetectsTampering) {
  const auto out = run_experiment(small_bench(2, 1));
  {
    auto r = out.record;
    r["runs"][1]["rows"][5]["losses"][0] = 0.123;
    const auto rep = verify_record(r);
    EXPECT_FALSE(rep.ok);
  }
  {
    auto r = out.record;
    r["runs"][0]["summary"]["external_regret"] = r["runs"][0]["summary"]["external_regret"].get<double>() + 1e-6;
    EXPECT_FALSE(verify_record(r).ok);
  }
  {
    auto r = out.record;
    r["aggregate"]["bound_satisfied"] = !r["aggregate"]["bound_satisfied"].get<bool>();
    EXPECT_FALSE(verify_record(r).ok);
  }
  {
    auto r = out.record;
    r["config"]["regret_bench"]["horizon"] = 301;
    EXPECT_FALSE(verify_record(r).ok);
  }
  EXPECT_FALSE(verify_record(Json::object()).ok);
  EXPECT_FALSE(verify_record(Json::array()).ok);
}

TEST(Verify, ToleratesLastDigitNoise) {
  const auto out = run_experiment(small_bench(1, 1));
  auto r = out.record;
  auto& v = r["runs"][0]["summary"]["external_regret"];
  v = v.get<double>() * (1 + 1e-13);
  EXPECT_TRUE(verify_record(r).ok);
}

TEST(Games, SummaryAgreesWithTranscript) {
  for (const char* kind : {"simulate-game1", "simulate-game2"}) {
    const auto c = small_game(kind);
    const auto out = run_experiment(c);
    const auto& run = out.record.at("runs")[0];
    const auto spec = build_game_spec(*c.game, 11);
    const auto gk = game_kind(c);
    auto mech = contracting::SelectionMechanism::bandit(2, make_mono_bandit(c.learner, 3, 400), spec.contract, 11);
    const auto tr = contracting::play_game(spec, std::move(mech), 11, gk);
    const auto& s = run.at("summary");
    EXPECT_NEAR(s.at("principal_utility").get<double>(), tr.principal_total(), 1e-12) << kind;
    EXPECT_NEAR(s.at("policy_regret").get<double>(), contracting::policy_regret(tr, spec), 1e-12) << kind;
    const auto payouts = s.at("payouts").get<std::vector<double>>();
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(payouts[i], tr.payouts[i], 1e-12);
    EXPECT_EQ(run.at("rows").size(), 400u);
  }
}

TEST(Games, LimitedLiabilityFlags) {
  const auto out = run_experiment(small_game("simulate-game2"));
  const auto& a = out.record.at("aggregate");
  EXPECT_TRUE(a.contains("liability_bound"));
  EXPECT_TRUE(a.at("payouts_nonnegative").get<bool>());
  for (const auto& run : out.record.at("runs"))
    for (double p : run.at("summary").at("payouts").get<std::vector<double>>()) EXPECT_GE(p, 0.0);
}

TEST(Games, OutsideOptionWrittenAsNone) {
  auto c = small_game("simulate-game1");
  c.game->mechanism = io::MechanismSpec{"constant", 2};
  c.seeds.replicates = 1;
  const auto out = run_experiment(c);
  const auto* csv = find_file(out, "simulate-game1_seed11.csv");
  ASSERT_NE(csv, nullptr);
  EXPECT_NE(csv->find("\n0,none,0,0,0,0,"), std::string::npos);
  EXPECT_FALSE(out.record.at("aggregate").contains("bound"));
}

TEST(Games, BadModelBecomesConfigError) {
  auto c = small_game("simulate-game1");
  c.game->agents[0].cost.coef = -1.0;
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(AppendixB, RecordReproducesGolden) {
  const auto out = run_experiment(load("repro_appendix_b.json"));
  EXPECT_EQ(out.status, kExitOk);
  const auto& s = out.record.at("runs")[0].at("summary");
  EXPECT_TRUE(s.at("golden_ok").get<bool>());
  EXPECT_EQ(s.at("cells_checked").get<std::size_t>(), 90u);
  EXPECT_EQ(s.at("negative_first_column_rounds"), Json({99, 100}));
  EXPECT_EQ(out.record.at("runs")[0].at("checks").at("trajectory_violating_rounds"), Json({99, 100}));
  EXPECT_NE(find_file(out, "repro_appendix_b_matrices.csv"), nullptr);
  EXPECT_TRUE(verify_record(out.record).ok);
}

TEST(AppendixB, TamperedFixtureFails) {
  auto fx = std::string(appendix_b::kFixtureText);
  fx.replace(fx.find("0.34215564"), 10, "0.34225564");
  const auto path = ::testing::TempDir() + "/tampered_golden.txt";
  {
    std::ofstream f(path);
    f << fx;
  }
  auto c = load("repro_appendix_b.json");
  c.appendix_b->fixture = path;
  const auto out = run_experiment(c);
  EXPECT_EQ(out.status, kExitCheckFailed);
  EXPECT_EQ(out.record.at("runs")[0].at("summary").at("mismatches").size(), 1u);
}

TEST(Desk, RecordChecksPass) {
  auto c = load("desk_eq.json");
  c.desk->deviations = 20;
  c.desk->mc_samples = 200'000;
  const auto out = run_experiment(c);
  EXPECT_EQ(out.status, kExitOk) << (out.failures.empty() ? "" : out.failures[0]);
  const auto& run = out.record.at("runs")[0];
  EXPECT_LE(run.at("summary").at("max_residual").get<double>(), desk::kExactTol);
  EXPECT_TRUE(run.at("checks").at("myopic_ok").get<bool>());
  EXPECT_TRUE(verify_record(out.record).ok);
}

TEST(Monotone, SmallRunIsClean) {
  auto c = load("monotone_check.json");
  c.monotone_check->pairs = 50;
  c.seeds.replicates = 1;
  const auto out = run_experiment(c);
  EXPECT_EQ(out.record.at("aggregate").at("violating_pairs").get<std::size_t>(), 0u);
  EXPECT_EQ(out.status, kExitOk);
  EXPECT_TRUE(verify_record(out.record).ok);
}

TEST(ParallelFor, RethrowsFirstErrorByIndex) {
  std::vector<int> seen(10, 0);
  try {
    parallel_for(10, 4, [&](std::size_t i) {
      seen[i] = 1;
      if (i == 3 || i == 7) throw std::runtime_error("boom " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "boom 3");
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

}  // namespace
}  // namespace monocontract::experiments
