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
/// Lazy-tree swap-regret learner built from a no-external-regret base.
///
/// The horizon is laid out as a complete M-ary tree of depth d. Round t
/// (0-based) is written in base M as digits (s_1, ..., s_d). For every level
/// h there is one active base instance, owned by the tree node s_1..s_{h-1}.
/// It lives for M^{d-h+1} rounds, is updated once every M^{d-h} rounds with
/// the average of the losses buffered since its previous update, and is
/// replaced by a fresh instance when its node's span ends (except at the
/// horizon, where the final block is applied instead). The emitted
/// distribution is the uniform mixture of the d active instances.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "monocontract/learner.hpp"

namespace monocontract {

struct TreeSwapParams {
  std::size_t horizon = 1;
  /// Configured depth; the effective depth is the smallest d' with
  /// branching^d' >= horizon.
  std::size_t depth = 2;
  /// 0 derives ceil(horizon^(1/depth)).
  std::size_t branching = 0;
};

/// Shape of one tree level.
struct TreeLevel {
  std::size_t level = 0;         // 0 = root
  std::uint64_t period = 1;      // rounds between updates
  std::uint64_t span = 1;        // lifetime of one instance, in rounds
  std::size_t updates = 1;       // updates per lifetime (= branching)
};

/// Smallest integer M >= 1 with M^depth >= horizon.
inline std::size_t tree_branching(std::size_t horizon, std::size_t depth) {
  if (depth == 0) throw DomainError("TreeSwap: depth must be positive");
  if (horizon <= 1) return 1;
  auto m = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(horizon), 1.0 / static_cast<double>(depth))));
  if (m < 1) m = 1;
  auto covers = [&](std::size_t b) {
    long double p = 1;
    for (std::size_t i = 0; i < depth; ++i) p *= static_cast<long double>(b);
    return p >= static_cast<long double>(horizon);
  };
  while (m > 1 && covers(m - 1)) --m;
  while (!covers(m)) ++m;
  return m;
}

/// Smallest d' >= 1 with branching^d' >= horizon (capped at the configured
/// depth).
inline std::size_t tree_effective_depth(std::size_t horizon, std::size_t branching, std::size_t depth) {
  if (branching <= 1) return 1;
  std::size_t d = 1;
  long double p = static_cast<long double>(branching);
  while (p < static_cast<long double>(horizon) && d < depth) {
    p *= static_cast<long double>(branching);
    ++d;
  }
  return d;
}

template <FullInfoLearner Base>
class TreeSwap {
 public:
  using Factory = std::function<Base(const TreeLevel&)>;

  TreeSwap(std::size_t k, TreeSwapParams params, Factory factory)
      : k_(k), horizon_(params.horizon), factory_(std::move(factory)) {
    if (k == 0) throw DomainError("TreeSwap: k must be positive");
    if (params.horizon == 0) throw DomainError("TreeSwap: horizon must be positive");
    if (params.depth == 0) throw DomainError("TreeSwap: depth must be positive");
    branching_ = params.branching != 0 ? params.branching : tree_branching(params.horizon, params.depth);
    const std::size_t depth =
        params.branching != 0 ? params.depth : tree_effective_depth(params.horizon, branching_, params.depth);
    levels_.resize(depth);
    std::uint64_t period = 1;
    for (std::size_t h = depth; h-- > 0;) {
      levels_[h] = TreeLevel{h, period, period * branching_, branching_};
      period *= branching_;
    }
    for (const auto& lv : levels_) {
      instances_.push_back(factory_(lv));
      if (instances_.back().num_arms() != k) throw DomainError("TreeSwap: base learner has wrong arm count");
    }
    buffers_.assign(depth, std::vector<double>(k, 0.0));
    mix();
  }

  std::size_t num_arms() const noexcept { return k_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t depth() const noexcept { return levels_.size(); }
  std::size_t branching() const noexcept { return branching_; }
  std::size_t round() const noexcept { return static_cast<std::size_t>(round_); }
  std::span<const TreeLevel> levels() const noexcept { return levels_; }
  std::span<const Base> instances() const noexcept { return instances_; }
  const Distribution& distribution() const noexcept { return current_; }

  const Distribution& observe(std::span<const double> loss) {
    if (loss.size() != k_) throw DomainError("TreeSwap: loss length mismatch");
    if (round_ >= horizon_) throw DomainError("TreeSwap: horizon exhausted");
    ++round_;
    for (std::size_t h = 0; h < levels_.size(); ++h) {
      auto& buf = buffers_[h];
      for (std::size_t j = 0; j < k_; ++j) buf[j] += loss[j];
      const auto& lv = levels_[h];
      if (round_ % lv.span == 0 && round_ < horizon_) {
        instances_[h] = factory_(lv);
        std::fill(buf.begin(), buf.end(), 0.0);
      } else if (round_ % lv.period == 0) {
        const double inv = 1.0 / static_cast<double>(lv.period);
        for (double& x : buf) x *= inv;
        instances_[h].observe(buf);
        std::fill(buf.begin(), buf.end(), 0.0);
      }
    }
    mix();
    return current_;
  }

 private:
  void mix() {
    std::vector<double> m(k_, 0.0);
    const double w = 1.0 / static_cast<double>(instances_.size());
    for (const auto& inst : instances_) {
      const auto p = inst.distribution().probs();
      for (std::size_t j = 0; j < k_; ++j) m[j] += w * p[j];
    }
    current_ = normalize(m);
  }

  std::size_t k_;
  std::uint64_t horizon_;
  std::size_t branching_ = 1;
  Factory factory_;
  std::vector<TreeLevel> levels_;
  std::vector<Base> instances_;
  std::vector<std::vector<double>> buffers_;
  std::uint64_t round_ = 0;
  Distribution current_;
};

template <FullInfoLearner Base>
std::pair<TreeSwap<Base>, Distribution> treeswap_step(TreeSwap<Base> state, const LossVector& loss) {
  Distribution d = state.observe(loss.values());
  return {std::move(state), std::move(d)};
}

}  // namespace monocontract
