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
/// Reproduction of the published Blum–Mansour non-monotonicity example:
/// the two loss sequences, the golden fixture (a plain-text file, also
/// compiled in) and a runner that checks every printed entry.

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "monocontract/blum_mansour.hpp"
#include "monocontract/monotone.hpp"

namespace monocontract::appendix_b {

inline constexpr std::size_t kArms = 3;
inline constexpr std::size_t kHorizon = 100;
inline constexpr double kEta = 0.2;

/// First 50 rows [-0.1, 1, 0], last 50 rows [1, -1, 0].
inline LossMatrix sequence_l1() {
  LossMatrix l(kHorizon);
  for (std::size_t t = 0; t < kHorizon; ++t)
    l[t] = t < 50 ? std::vector<double>{-0.1, 1.0, 0.0} : std::vector<double>{1.0, -1.0, 0.0};
  return l;
}

/// l1 with row 1 replaced by [-2, 1, 0].
inline LossMatrix sequence_l2() {
  LossMatrix l = sequence_l1();
  l[0] = {-2.0, 1.0, 0.0};
  return l;
}

/// The l1 -> l2 change as a perturbation pair on arm 0.
inline PerturbationPair perturbation() { return PerturbationPair{sequence_l1(), 0, 0, 1.9}; }

/// Losses of both sequences lie in [-2, 1].
inline constexpr LossRange kRange{-2.0, 1.0};

struct GoldenRow {
  std::size_t round = 0;
  std::vector<double> values;
};

struct GoldenFixture {
  double eta = kEta;
  double tolerance = 1e-6;
  /// Keyed by matrix name: "l1", "l2", "diff".
  std::map<std::string, std::vector<GoldenRow>> matrices;
};

/// Contents of data/appendix_b_golden.txt.
inline constexpr std::string_view kFixtureText = R"fixture(
# Blum-Mansour non-monotonicity counterexample.
# eta = 0.2, k = 3, T = 100.
# l1: rows 1-50 are [-0.1, 1, 0], rows 51-100 are [1, -1, 0].
# l2: identical to l1 except row 1 is [-2, 1, 0].
#
# Each data line is: <round> <p0> <p1> <p2>, where <round> is the number of
# loss vectors observed before the distribution was emitted. Values are the
# published 8-significant-digit printout.
#
# The published l2 block lists rounds 2-6 at its head (its rows equal the
# l2 distributions after 2..6 losses); they are pinned to those rounds here.

format 1
learner blum-mansour
eta 0.2
tolerance 1e-6

matrix l1
1 0.34215564 0.31796216 0.33988219
2 0.35085386 0.30294422 0.34620192
3 0.35943921 0.28826134 0.35229945
4 0.36791983 0.27390192 0.35817825
5 0.37630081 0.25986054 0.36383865
96 0.02854018 0.70527045 0.26618936
97 0.02331378 0.73339873 0.24328749
98 0.01873113 0.76082639 0.22044248
99 0.01480289 0.78721832 0.19797879
100 0.01151108 0.81226442 0.1762245
end

matrix l2
2 0.38028178 0.28913796 0.33058027
3 0.38924322 0.27467575 0.33608103
4 0.39809792 0.26052829 0.34137379
5 0.40684786 0.24669652 0.34645563
6 0.41549209 0.23318649 0.35132142
96 0.02911013 0.72001336 0.25087651
97 0.02359428 0.74841294 0.22799278
98 0.0188028 0.77585784 0.20533936
99 0.01473706 0.80200257 0.18326037
100 0.01136643 0.82654706 0.1620865
end

matrix diff
1 2.90528236e-02 -1.40423773e-02 -1.50104462e-02
2 2.94279178e-02 -1.38062655e-02 -1.56216522e-02
3 2.98040066e-02 -1.35855831e-02 -1.62184235e-02
4 3.01780959e-02 -1.33736323e-02 -1.68044637e-02
5 3.05470484e-02 -1.31640258e-02 -1.73830227e-02
96 5.69949881e-04 1.47429088e-02 -1.53128587e-02
97 2.80500303e-04 1.50142094e-02 -1.52947097e-02
98 7.16695363e-05 1.50314536e-02 -1.51031232e-02
99 -6.58236902e-05 1.47842499e-02 -1.47184262e-02
100 -1.44649313e-04 1.42826443e-02 -1.41379950e-02
end
)fixture";

inline GoldenFixture parse_fixture(std::string_view text) {
  GoldenFixture fx;
  std::istringstream in{std::string(text)};
  std::string line, current;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ConfigError("golden fixture line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;
    if (head == "format") {
      int version = 0;
      if (!(ls >> version) || version != 1) fail("unsupported format version");
      continue;
    }
    if (head == "learner") {
      std::string name;
      if (!(ls >> name) || name != "blum-mansour") fail("unsupported learner");
      continue;
    }
    if (head == "eta") {
      if (!(ls >> fx.eta)) fail("bad eta");
    } else if (head == "tolerance") {
      if (!(ls >> fx.tolerance)) fail("bad tolerance");
    } else if (head == "matrix") {
      if (!current.empty()) fail("nested matrix");
      if (!(ls >> current)) fail("matrix without name");
      fx.matrices[current];
    } else if (head == "end") {
      if (current.empty()) fail("end outside matrix");
      current.clear();
    } else {
      if (current.empty()) fail("data row outside matrix");
      GoldenRow row;
      try {
        row.round = std::stoul(head);
      } catch (const std::exception&) {
        fail("bad round '" + head + "'");
      }
      double v;
      while (ls >> v) row.values.push_back(v);
      if (row.values.size() != kArms) fail("expected 3 values");
      fx.matrices[current].push_back(std::move(row));
    }
  }
  if (!current.empty()) fail("unterminated matrix");
  return fx;
}

inline GoldenFixture load_fixture(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open golden fixture " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_fixture(ss.str());
}

inline GoldenFixture builtin_fixture() { return parse_fixture(kFixtureText); }

struct CellMismatch {
  std::string matrix;
  std::size_t round = 0;
  std::size_t column = 0;
  double expected = 0.0;
  double computed = 0.0;
};

struct Report {
  /// Distributions after each loss vector, rounds 1..100.
  std::vector<Distribution> l1, l2;
  std::size_t cells_checked = 0;
  double max_abs_error = 0.0;
  std::vector<CellMismatch> mismatches;
  MonotonicityVerdict verdict;

  bool golden_ok() const { return mismatches.empty() && cells_checked > 0; }
  /// Computed rows for a printed block (rounds 1-5 and 96-100).
  std::vector<std::vector<double>> published_rows(const std::string& matrix) const;
};

inline std::vector<std::vector<double>> Report::published_rows(const std::string& matrix) const {
  std::vector<std::vector<double>> rows;
  for (std::size_t r : {1, 2, 3, 4, 5, 96, 97, 98, 99, 100}) {
    std::vector<double> row(kArms);
    for (std::size_t j = 0; j < kArms; ++j) {
      const double a = l1[r - 1][j], b = l2[r - 1][j];
      row[j] = matrix == "l1" ? a : matrix == "l2" ? b : b - a;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Runs Blum–Mansour on both sequences, checks every fixture cell and
/// runs the monotonicity check for arm 0 at tolerance `mono_tol`.
inline Report reproduce(const GoldenFixture& fx = builtin_fixture(), double mono_tol = 1e-12) {
  Report rep;
  auto make = [&] { return BlumMansour(kArms, fx.eta); };
  rep.l1 = trajectory(make(), sequence_l1());
  rep.l2 = trajectory(make(), sequence_l2());
  for (const auto& [name, rows] : fx.matrices) {
    for (const auto& row : rows) {
      if (row.round == 0 || row.round > kHorizon) throw ConfigError("golden fixture round out of range");
      for (std::size_t j = 0; j < kArms; ++j) {
        const double a = rep.l1[row.round - 1][j], b = rep.l2[row.round - 1][j];
        double computed;
        if (name == "l1") computed = a;
        else if (name == "l2") computed = b;
        else if (name == "diff") computed = b - a;
        else throw ConfigError("unknown golden matrix " + name);
        const double err = std::abs(computed - row.values[j]);
        ++rep.cells_checked;
        rep.max_abs_error = std::max(rep.max_abs_error, err);
        if (!(err <= fx.tolerance)) rep.mismatches.push_back({name, row.round, j, row.values[j], computed});
      }
    }
  }
  rep.verdict = check_full_info(make, perturbation(), mono_tol);
  return rep;
}

}  // namespace monocontract::appendix_b
