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
/// Named learner configurations and the bandit wrappers built from them.

#pragma once

#include <string>

#include "monocontract/blum_mansour.hpp"
#include "monocontract/exp_weights.hpp"
#include "monocontract/learner.hpp"
#include "monocontract/mono_bandit.hpp"
#include "monocontract/regret.hpp"
#include "monocontract/tree_swap.hpp"

namespace monocontract {

struct LearnerSpec {
  /// "mw" (Exponential Weights), "bm" (Blum–Mansour) or "treeswap"
  /// (lazy tree over Exponential Weights).
  std::string algorithm = "mw";
  /// Learning rate; 0 tunes it to the horizon and the recorded loss range.
  double eta = 0.0;
  /// Exploration rate of the bandit wrapper; negative derives it from the
  /// inner learner's bound.
  double epsilon = -1.0;
  std::size_t depth = 2;

  friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;
};

inline void validate(const LearnerSpec& s) {
  if (s.algorithm != "mw" && s.algorithm != "bm" && s.algorithm != "treeswap")
    throw ConfigError("learner.algorithm must be one of mw, bm, treeswap (got '" + s.algorithm + "')");
  if (s.eta < 0.0) throw ConfigError("learner.eta must be non-negative");
  if (s.epsilon > 1.0) throw ConfigError("learner.epsilon must not exceed 1");
  if (s.depth == 0) throw ConfigError("learner.depth must be positive");
}

/// Regret bound of the full-information learner on [0, 1] losses: external
/// for mw, swap for bm and treeswap.
inline double inner_bound(const LearnerSpec& s, std::size_t k, std::size_t horizon) {
  const auto t = static_cast<double>(horizon);
  const auto kk = static_cast<double>(k);
  if (s.algorithm == "mw") return bound_exp_weights(t, kk);
  if (s.algorithm == "bm") return bound_blum_mansour(t, kk);
  return bound_tree_swap(horizon, kk, s.depth);
}

inline double resolve_epsilon(const LearnerSpec& s, std::size_t k, std::size_t horizon) {
  if (s.epsilon >= 0.0) return s.epsilon;
  return choose_epsilon(static_cast<double>(horizon), static_cast<double>(k), inner_bound(s, k, horizon));
}

/// Regret bound of the bandit wrapper: 2 sqrt(k T R(T)).
inline double bandit_bound(const LearnerSpec& s, std::size_t k, std::size_t horizon) {
  return bound_mono_bandit(static_cast<double>(horizon), static_cast<double>(k), inner_bound(s, k, horizon));
}

/// Full-information learner for `k` arms over `horizon` rounds whose losses
/// lie in `range`.
inline AnyLearner make_learner(const LearnerSpec& s, std::size_t k, std::size_t horizon, LossRange range) {
  validate(s);
  if (s.algorithm == "mw") return ExpWeights(k, s.eta > 0.0 ? s.eta : tuned_eta(k, horizon, range));
  if (s.algorithm == "bm") return BlumMansour(k, s.eta > 0.0 ? s.eta : tuned_eta(k, horizon, range));
  const double eta = s.eta;
  return TreeSwap<ExpWeights>(k, TreeSwapParams{horizon, s.depth, 0}, [k, eta, range](const TreeLevel& lv) {
    return ExpWeights(k, eta > 0.0 ? eta : tuned_eta(k, lv.updates, range));
  });
}

/// Bandit wrapper whose inner learner sees the importance-weighted vectors
/// of [0, 1] feedback.
inline MonoBandit<AnyLearner> make_mono_bandit(const LearnerSpec& s, std::size_t k, std::size_t horizon) {
  const double eps = resolve_epsilon(s, k, horizon);
  const LossRange recorded = recorded_loss_range(k, eps, LossRange{0.0, 1.0});
  return MonoBandit<AnyLearner>(make_learner(s, k, horizon, recorded), eps);
}

}  // namespace monocontract
