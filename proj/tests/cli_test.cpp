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

// Drives the monocontract executable end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string kCli = MONOCONTRACT_CLI;
const std::string kConfigs = MONOCONTRACT_CONFIG_DIR;

int run(const std::string& args) {
  const int rc = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::path(::testing::TempDir()) / ("monocontract_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& body) {
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

constexpr const char* kSmallBench =
    R"({"experiment": "regret-bench", "seeds": {"base": 3, "replicates": 3},
        "regret_bench": {"arms": 3, "horizon": 500, "suite": "switching"}})";

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const auto d = scratch("determinism");
  const auto cfg = write(d, "bench.json", kSmallBench);
  ASSERT_EQ(run("run " + cfg.string() + " --out-dir " + (d / "a").string() + " --threads 1"), 0);
  ASSERT_EQ(run("run " + cfg.string() + " --out-dir " + (d / "b").string() + " --threads 3"), 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(d / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(d / "b" / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_EQ(files, 4u);
}

TEST(Cli, EnvironmentOverridesOutputDirectory) {
  const auto d = scratch("env");
  const auto cfg = write(d, "bench.json", kSmallBench);
  const std::string cmd = "MONOCONTRACT_OUT_DIR=" + (d / "env_out").string() + " " + kCli + " run " + cfg.string() +
                          " >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(d / "env_out" / "regret-bench.json"));
}

TEST(Cli, VerifyAcceptsAndRejects) {
  const auto d = scratch("verify");
  const auto cfg = write(d, "bench.json", kSmallBench);
  ASSERT_EQ(run("run " + cfg.string() + " --out-dir " + d.string()), 0);
  const auto record = d / "regret-bench.json";
  EXPECT_EQ(run("verify " + record.string()), 0);
  auto text = slurp(record);
  const auto pos = text.find("\"losses\": [");
  ASSERT_NE(pos, std::string::npos);
  const auto digit = text.find_first_of("0123456789", pos + 11);
  text[digit] = text[digit] == '0' ? '1' : '0';
  write(d, "tampered.json", text);
  EXPECT_EQ(run("verify " + (d / "tampered.json").string()), 2);
  write(d, "broken.json", "{ not json");
  EXPECT_EQ(run("verify " + (d / "broken.json").string()), 1);
}

TEST(Cli, ReproAppendixB) {
  const auto d = scratch("repro");
  EXPECT_EQ(run("repro-appendix-b --out-dir " + d.string()), 0);
  const auto csv = slurp(d / "repro-appendix-b_matrices.csv");
  EXPECT_NE(csv.find("diff,100,-0.00014464931,"), std::string::npos) << csv;
  std::ifstream in(std::string(MONOCONTRACT_DATA_DIR) + "/appendix_b_golden.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  auto golden = ss.str();
  golden.replace(golden.find("0.81226442"), 10, "0.81236442");
  const auto fx = write(d, "bad_golden.txt", golden);
  EXPECT_EQ(run("repro-appendix-b --fixture " + fx.string() + " --out-dir " + d.string()), 2);
}

TEST(Cli, ConfigErrorsExitOne) {
  const auto d = scratch("errors");
  EXPECT_EQ(run("run " + (d / "missing.json").string()), 1);
  EXPECT_EQ(run("run " + write(d, "syntax.json", "{\"experiment\": }").string()), 1);
  EXPECT_EQ(run("run " + write(d, "field.json", R"({"experiment": "regret-bench", "regret_bench": {"armz": 3}})")
                              .string()),
            1);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("bogus"), 1);
}

TEST(Cli, DiagnosticsNameTheField) {
  const auto d = scratch("diag");
  const auto cfg = write(d, "field.json", R"({"experiment": "regret-bench", "regret_bench": {"armz": 3}})");
  const auto log = d / "log.txt";
  EXPECT_EQ(WEXITSTATUS(std::system((kCli + " run " + cfg.string() + " 2>" + log.string()).c_str())), 1);
  EXPECT_NE(slurp(log).find("regret_bench"), std::string::npos) << slurp(log);
}

TEST(Cli, SampleConfigsRun) {
  const auto d = scratch("samples");
  for (const char* name : {"monotone_check_bandit.json", "simulate_game2.json"})
    EXPECT_EQ(run("run " + kConfigs + "/" + name + " --out-dir " + d.string()), 0) << name;
  EXPECT_EQ(run("verify " + (d / "simulate_game2.json").string()), 0);
}

}  // namespace
