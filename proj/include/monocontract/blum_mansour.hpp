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

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "monocontract/exp_weights.hpp"
#include "monocontract/stationary.hpp"

namespace monocontract {

/// Blum–Mansour swap-regret learner over k copies of Exponential Weights.
///
/// Copy i is charged p[i] * loss, where p is the distribution played in the
/// round. The next distribution is the fixed point of the matrix whose i-th
/// column is copy i's distribution.
class BlumMansour {
 public:
  BlumMansour(std::size_t k, double eta, StationaryOptions opts = {}) : opts_(opts) {
    if (k == 0) throw DomainError("BlumMansour: k must be positive");
    copies_.reserve(k);
    for (std::size_t i = 0; i < k; ++i) copies_.emplace_back(k, eta);
    current_ = Distribution::uniform(k);
  }

  std::size_t num_arms() const noexcept { return copies_.size(); }
  const Distribution& distribution() const noexcept { return current_; }
  std::span<const ExpWeights> copies() const noexcept { return copies_; }

  /// Columns of the combination matrix, one per copy.
  std::vector<Distribution> columns() const {
    std::vector<Distribution> cols;
    cols.reserve(copies_.size());
    for (const auto& c : copies_) cols.push_back(c.distribution());
    return cols;
  }

  const Distribution& observe(std::span<const double> loss) {
    const std::size_t k = copies_.size();
    if (loss.size() != k) throw DomainError("BlumMansour: loss length mismatch");
    std::vector<double> scaled(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double share = current_[i];
      for (std::size_t j = 0; j < k; ++j) scaled[j] = share * loss[j];
      copies_[i].observe(scaled);
    }
    const auto cols = columns();
    current_ = stationary_distribution(cols, opts_);
    return current_;
  }

 private:
  StationaryOptions opts_;
  std::vector<ExpWeights> copies_;
  Distribution current_;
};

inline std::pair<BlumMansour, Distribution> bm_step(BlumMansour state, const LossVector& loss) {
  Distribution d = state.observe(loss.values());
  return {std::move(state), std::move(d)};
}

}  // namespace monocontract
