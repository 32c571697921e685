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
/// Offline regret meters over a realized play sequence and the full loss
/// matrix, plus closed-form bound calculators.
///
/// The meters see every arm's loss even when the learner only saw bandit
/// feedback; they evaluate a run, they do not take part in it.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "monocontract/core.hpp"
#include "monocontract/tree_swap.hpp"

namespace monocontract {

/// Row-major T x k matrix of losses.
using LossMatrix = std::vector<std::vector<double>>;

struct ExternalRegret {
  double value = 0.0;
  std::size_t best_fixed_arm = 0;
};

struct SwapRegret {
  double value = 0.0;
  /// best_swap[i] is the arm that source arm i is reassigned to.
  std::vector<std::size_t> best_swap;
};

struct RegretReport {
  double external = 0.0;
  double swap = 0.0;
  std::size_t best_fixed_arm = 0;
  std::vector<std::size_t> best_swap_function;
  double bound_external = 0.0;
  double bound_swap = 0.0;
};

namespace detail {

inline std::size_t check_shapes(std::span<const std::size_t> plays, const LossMatrix& losses) {
  if (plays.size() != losses.size()) throw DomainError("regret: plays and loss rows differ in length");
  if (losses.empty()) return 0;
  const std::size_t k = losses.front().size();
  for (std::size_t t = 0; t < losses.size(); ++t) {
    if (losses[t].size() != k) throw DomainError("regret: ragged loss matrix");
    if (plays[t] >= k) throw DomainError("regret: play index out of range");
  }
  return k;
}

}  // namespace detail

/// Realized loss minus the loss of the best fixed arm (smallest index on
/// ties).
inline ExternalRegret external_regret(std::span<const std::size_t> plays, const LossMatrix& losses) {
  const std::size_t k = detail::check_shapes(plays, losses);
  if (k == 0) return {};
  std::vector<double> totals(k, 0.0);
  double realized = 0.0;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    realized += losses[t][plays[t]];
    for (std::size_t i = 0; i < k; ++i) totals[i] += losses[t][i];
  }
  ExternalRegret r;
  for (std::size_t i = 1; i < k; ++i)
    if (totals[i] < totals[r.best_fixed_arm]) r.best_fixed_arm = i;
  r.value = realized - totals[r.best_fixed_arm];
  return r;
}

/// Swap regret. The objective separates over source arms, so each source
/// arm independently takes the target with the smallest loss summed over the
/// rounds it was played (smallest index on ties).
inline SwapRegret swap_regret(std::span<const std::size_t> plays, const LossMatrix& losses) {
  const std::size_t k = detail::check_shapes(plays, losses);
  if (k == 0) return {};
  // sums[i][j]: loss of arm j over rounds where i was played.
  std::vector<std::vector<double>> sums(k, std::vector<double>(k, 0.0));
  for (std::size_t t = 0; t < losses.size(); ++t) {
    auto& row = sums[plays[t]];
    for (std::size_t j = 0; j < k; ++j) row[j] += losses[t][j];
  }
  SwapRegret r;
  r.best_swap.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j)
      if (sums[i][j] < sums[i][best]) best = j;
    r.best_swap[i] = best;
    r.value += sums[i][i] - sums[i][best];
  }
  return r;
}

/// Running external and swap regret after each round, maintained in
/// O(k^2) per round.
class RegretTracker {
 public:
  explicit RegretTracker(std::size_t k)
      : k_(k), totals_(k, 0.0), sums_(k, std::vector<double>(k, 0.0)) {}

  void push(std::size_t play, std::span<const double> losses) {
    if (losses.size() != k_ || play >= k_) throw DomainError("RegretTracker: shape mismatch");
    realized_ += losses[play];
    for (std::size_t j = 0; j < k_; ++j) {
      totals_[j] += losses[j];
      sums_[play][j] += losses[j];
    }
  }

  double external() const {
    double best = totals_[0];
    for (double x : totals_) best = std::min(best, x);
    return realized_ - best;
  }

  double swap() const {
    double v = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      double best = sums_[i][0];
      for (double x : sums_[i]) best = std::min(best, x);
      v += sums_[i][i] - best;
    }
    return v;
  }

 private:
  std::size_t k_;
  double realized_ = 0.0;
  std::vector<double> totals_;
  std::vector<std::vector<double>> sums_;
};

// Bounds ---------------------------------------------------------------------

/// External regret of Exponential Weights on [0, 1] losses: sqrt(ln k * T).
inline double bound_exp_weights(double horizon, double k) { return std::sqrt(std::log(k) * horizon); }

/// Swap regret of Blum–Mansour on [0, 1] losses: sqrt(k * ln k * T).
inline double bound_blum_mansour(double horizon, double k) { return std::sqrt(k * std::log(k) * horizon); }

/// Learning term of the lazy-tree construction on [0, 1] losses:
/// T * sqrt(ln k / M) with branching M = ceil(T^(1/depth)). The tree's own
/// approximation term is excluded; the construction is only known to be
/// o(T) overall.
inline double bound_tree_swap(std::size_t horizon, double k, std::size_t depth) {
  const auto m = static_cast<double>(tree_branching(horizon, depth));
  return static_cast<double>(horizon) * std::sqrt(std::log(k) / m);
}

/// 2 sqrt(k T R(T)): regret of the bandit reduction around an inner learner
/// with regret R(T).
inline double bound_mono_bandit(double horizon, double k, double inner_bound) {
  if (horizon < 0.0 || k < 0.0 || inner_bound < 0.0) throw DomainError("bound_mono_bandit: negative input");
  return 2.0 * std::sqrt(k * horizon * inner_bound);
}

/// 2 sqrt(k sqrt(ln k)) T^(3/4): the reduction wrapped around Exponential
/// Weights.
inline double bound_mono_bandit_mw(double horizon, double k) {
  return 2.0 * std::sqrt(k * std::sqrt(std::log(k))) * std::pow(horizon, 0.75);
}

/// Fills a RegretReport from a realized run.
inline RegretReport regret_report(std::span<const std::size_t> plays, const LossMatrix& losses,
                                  double bound_external, double bound_swap) {
  const auto ext = external_regret(plays, losses);
  auto sw = swap_regret(plays, losses);
  return RegretReport{ext.value, sw.value, ext.best_fixed_arm, std::move(sw.best_swap), bound_external, bound_swap};
}

}  // namespace monocontract
