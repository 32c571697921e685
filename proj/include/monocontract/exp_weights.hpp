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

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "monocontract/core.hpp"

namespace monocontract {

/// Learning rate sqrt(8 ln k / n) / width for n updates on losses spanning
/// `range`. Returns 1 when k == 1 (the rate is irrelevant there).
inline double tuned_eta(std::size_t k, std::size_t updates, LossRange range) {
  if (k <= 1 || updates == 0) return 1.0;
  const double width = range.width() > 0.0 ? range.width() : 1.0;
  return std::sqrt(8.0 * std::log(static_cast<double>(k)) / static_cast<double>(updates)) / width;
}

/// Exponential Weights (Hedge). Weights start at one and are multiplied by
/// exp(-eta * loss) after every observation.
///
/// Weights are held as logarithms and shifted so the largest is zero once
/// they drift past a threshold; the shift is a common rescaling and leaves
/// the emitted distribution unchanged.
class ExpWeights {
 public:
  ExpWeights(std::size_t k, double eta) : eta_(eta), log_w_(k, 0.0) {
    if (k == 0) throw DomainError("ExpWeights: k must be positive");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("ExpWeights: eta must be positive");
    current_ = Distribution::uniform(k);
  }

  std::size_t num_arms() const noexcept { return log_w_.size(); }
  double eta() const noexcept { return eta_; }
  const Distribution& distribution() const noexcept { return current_; }

  /// Weights up to a common positive factor (largest weight is one).
  std::vector<double> weights() const {
    const double m = max_log();
    std::vector<double> w(log_w_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_w_[i] - m);
    return w;
  }

  const Distribution& observe(std::span<const double> loss) {
    if (loss.size() != log_w_.size()) throw DomainError("ExpWeights: loss length mismatch");
    for (std::size_t i = 0; i < log_w_.size(); ++i) {
      if (!std::isfinite(loss[i])) throw DomainError("ExpWeights: non-finite loss");
      log_w_[i] -= eta_ * loss[i];
    }
    const double m = max_log();
    if (std::abs(m) > kShiftThreshold)
      for (double& lw : log_w_) lw -= m;
    current_ = normalize(weights());
    return current_;
  }

 private:
  static constexpr double kShiftThreshold = 256.0;

  double max_log() const {
    double m = log_w_[0];
    for (double lw : log_w_) m = std::max(m, lw);
    return m;
  }

  double eta_;
  std::vector<double> log_w_;
  Distribution current_;
};

/// Value-semantics step: consumes a state, returns the advanced state and
/// the distribution it now emits.
inline std::pair<ExpWeights, Distribution> expweights_step(ExpWeights state, const LossVector& loss) {
  Distribution d = state.observe(loss.values());
  return {std::move(state), std::move(d)};
}

}  // namespace monocontract
