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

// monocontract: run experiments from a JSON config, verify run records and
// reproduce the Blum-Mansour golden table.
//
//   monocontract run CONFIG [--out-dir DIR] [--threads N]
//   monocontract verify RECORD
//   monocontract repro-appendix-b [--fixture FILE] [--out-dir DIR]
//
// The output directory is taken from --out-dir, else MONOCONTRACT_OUT_DIR,
// else the config. Exit codes: 0 success, 1 config error, 2 golden or bound
// failure, 3 numerical error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "monocontract/experiments.hpp"

namespace mc = monocontract;
namespace ex = monocontract::experiments;

namespace {

void apply_out_dir(mc::io::ExperimentConfig& c, const std::string& flag) {
  if (!flag.empty()) c.output.dir = flag;
  else if (const char* env = std::getenv("MONOCONTRACT_OUT_DIR"); env && *env) c.output.dir = env;
}

void write_outputs(const mc::io::ExperimentConfig& c, const ex::RunOutput& out) {
  namespace fs = std::filesystem;
  fs::create_directories(c.output.dir);
  for (const auto& [name, body] : out.files) {
    const auto path = fs::path(c.output.dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << body;
    if (!f) throw mc::ConfigError("cannot write " + path.string());
  }
}

void report_appendix_mismatches(const ex::RunOutput& out) {
  for (const auto& m : out.record.at("runs")[0].at("summary").at("mismatches"))
    std::cerr << "golden mismatch: matrix " << m.at("matrix").get<std::string>() << " round " << m.at("round")
              << " column " << m.at("column") << ": expected " << m.at("expected") << ", computed "
              << m.at("computed") << "\n";
}

int run_config(mc::io::ExperimentConfig c, const std::string& out_dir, int threads) {
  apply_out_dir(c, out_dir);
  if (threads >= 0) c.threads = static_cast<std::size_t>(threads);
  const auto out = ex::run_experiment(c);
  write_outputs(c, out);
  if (c.experiment == "repro-appendix-b") report_appendix_mismatches(out);
  for (const auto& f : out.failures) std::cerr << "check failed: " << f << "\n";
  std::cout << c.experiment << " config_hash " << mc::io::config_hash(c) << " seeds "
            << out.record.at("runs").size() << " status " << out.record.at("status").get<std::string>()
            << " -> " << (std::filesystem::path(c.output.dir) / (c.output.prefix + ".json")).string() << "\n";
  return out.status;
}

int verify_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw mc::ConfigError("cannot open record " + path);
  mc::io::Json record;
  try {
    record = mc::io::Json::parse(f);
  } catch (const mc::io::Json::parse_error& e) {
    throw mc::ConfigError("record " + path + ": " + e.what());
  }
  const auto rep = ex::verify_record(record);
  for (const auto& p : rep.problems) std::cerr << "mismatch: " << p << "\n";
  std::cout << path << ": " << (rep.ok ? "verified" : "NOT verified") << "\n";
  return rep.ok ? ex::kExitOk : ex::kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone online learning and contracting experiments"};
  app.require_subcommand(1);

  std::string config_path, record_path, fixture, out_dir;
  int threads = -1;

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out-dir", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "Recompute summaries of a run record from its rows");
  verify->add_option("record", record_path, "Record JSON file")->required();

  auto* repro = app.add_subcommand("repro-appendix-b", "Reproduce the Blum-Mansour golden table");
  repro->add_option("--fixture", fixture, "Golden fixture file (default: built-in copy)");
  repro->add_option("--out-dir", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ex::kExitConfig;
  }

  try {
    if (*run) return run_config(mc::io::load_config(config_path), out_dir, threads);
    if (*verify) return verify_file(record_path);
    mc::io::Json j{{"experiment", "repro-appendix-b"}, {"appendix_b", {{"fixture", fixture}}}};
    return run_config(mc::io::config_from_json(j), out_dir, threads);
  } catch (const mc::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << " (residual " << e.residual() << ")\n";
    return ex::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ex::kExitConfig;
  }
}
