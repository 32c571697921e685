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
/// Full-information to bandit reduction by uniform exploration.
///
/// Each round one uniform variate from the exploration stream decides
/// between EXPLOIT (probability 1 - eps) and exploring arm j (probability
/// eps / k each). An explored arm's feedback b is recorded as k*b/eps at
/// coordinate j and zero elsewhere; an exploit round records the zero
/// vector. The inner learner is advanced once per round with the recorded
/// vector and never sees the exploration flag or the raw feedback.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "monocontract/learner.hpp"

namespace monocontract {

/// Exploration rate minimising (k/eps) R + eps T, clamped to [0, 1].
inline double choose_epsilon(double horizon, double k, double regret_bound) {
  if (!(horizon >= 1.0) || !(k >= 1.0) || !(regret_bound >= 0.0))
    throw DomainError("choose_epsilon: need T >= 1, k >= 1, R >= 0");
  return std::min(1.0, std::sqrt(k * regret_bound / horizon));
}

/// Range of the importance-weighted vectors fed to the inner learner.
inline LossRange recorded_loss_range(std::size_t k, double epsilon, LossRange feedback) {
  if (epsilon <= 0.0) return LossRange{0.0, 0.0};
  const double scale = static_cast<double>(k) / epsilon;
  return LossRange{std::min(0.0, scale * feedback.lo), std::max(0.0, scale * feedback.hi)};
}

/// Branch of the exploration draw: nullopt is EXPLOIT.
using ExploreBranch = std::optional<std::size_t>;

/// Maps one uniform variate to a branch.
inline ExploreBranch decode_explore_draw(double u, double epsilon, std::size_t k) {
  if (!(u < epsilon)) return std::nullopt;
  auto j = static_cast<std::size_t>(std::floor(u * static_cast<double>(k) / epsilon));
  return std::min(j, k - 1);
}

/// Probability of a branch.
inline double explore_branch_probability(const ExploreBranch& b, double epsilon, std::size_t k) {
  return b ? epsilon / static_cast<double>(k) : 1.0 - epsilon;
}

/// Vector recorded for the inner learner on branch `b` with feedback
/// `feedback` on the explored arm.
inline std::vector<double> recorded_vector(std::size_t k, double epsilon, const ExploreBranch& b,
                                           double feedback) {
  std::vector<double> v(k, 0.0);
  if (b) v[*b] = static_cast<double>(k) * feedback / epsilon;
  return v;
}

template <FullInfoLearner Inner>
class MonoBandit {
 public:
  struct Round {
    std::size_t arm = 0;
    bool explored = false;
    double feedback = 0.0;
    DrawId explore_draw;
    std::optional<DrawId> exploit_draw;
  };

  MonoBandit(Inner inner, double epsilon) : inner_(std::move(inner)), epsilon_(epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("MonoBandit: epsilon must lie in [0, 1]");
  }

  std::size_t num_arms() const { return inner_.num_arms(); }
  double epsilon() const noexcept { return epsilon_; }
  const Inner& inner() const noexcept { return inner_; }
  /// Distribution used on exploit rounds.
  const Distribution& distribution() const { return inner_.distribution(); }

  /// Marginal selection probabilities for the coming round.
  Distribution selection_distribution() const {
    const std::size_t k = num_arms();
    const auto p = inner_.distribution().probs();
    std::vector<double> m(k);
    for (std::size_t i = 0; i < k; ++i) m[i] = epsilon_ / static_cast<double>(k) + (1.0 - epsilon_) * p[i];
    return normalize(m);
  }

  /// Plays one round. `feedback(arm)` returns the realized loss of the played
  /// arm; it is invoked exactly once per round.
  template <typename Feedback>
  Round play(SeededRng& rng_b, SeededRng& rng_f, Feedback&& feedback) {
    Round r;
    r.explore_draw = rng_b.next_id();
    const ExploreBranch branch = decode_explore_draw(rng_b.uniform01(), epsilon_, num_arms());
    if (branch) {
      r.arm = *branch;
      r.explored = true;
    } else {
      r.exploit_draw = rng_f.next_id();
      r.arm = sample(inner_.distribution(), rng_f);
    }
    r.feedback = std::forward<Feedback>(feedback)(r.arm);
    advance(branch, r.feedback);
    return r;
  }

  /// Records the vector for `branch` and advances the inner learner once.
  void advance(const ExploreBranch& branch, double feedback) {
    const auto v = recorded_vector(num_arms(), epsilon_, branch, feedback);
    inner_.observe(v);
  }

 private:
  Inner inner_;
  double epsilon_;
};

}  // namespace monocontract
