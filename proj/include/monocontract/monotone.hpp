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
/// Monotonicity harness. A pair of loss sequences differs in one cell, where
/// the second sequence has the strictly smaller loss; a monotone learner
/// must never lower the probability of that arm in any later round.
///
/// Round numbering: distribution r (1-based) is the one a learner emits after
/// observing r loss vectors, i.e. the distribution it plays in round r + 1.
/// Perturbing loss row `round` (0-based) therefore affects distributions
/// `round + 1` onward, and those are the ones compared.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "monocontract/learner.hpp"
#include "monocontract/mono_bandit.hpp"
#include "monocontract/regret.hpp"

namespace monocontract {

struct PerturbationPair {
  LossMatrix base;
  std::size_t round = 0;  // 0-based row of the perturbed loss
  std::size_t arm = 0;
  double delta = 0.0;     // amount subtracted from base[round][arm]

  std::size_t horizon() const noexcept { return base.size(); }
  std::size_t num_arms() const { return base.empty() ? 0 : base.front().size(); }

  void validate() const {
    if (base.empty()) throw DomainError("PerturbationPair: empty loss sequence");
    if (round >= base.size()) throw DomainError("PerturbationPair: round out of range");
    if (arm >= num_arms()) throw DomainError("PerturbationPair: arm out of range");
    if (!(delta >= 0.0)) throw DomainError("PerturbationPair: delta must be non-negative");
  }

  LossMatrix perturbed() const {
    validate();
    LossMatrix p = base;
    p[round][arm] -= delta;
    return p;
  }
};

struct Violation {
  std::size_t round = 0;  // distribution index as described in the file comment
  double prob_base = 0.0;
  double prob_perturbed = 0.0;
};

struct MonotonicityVerdict {
  bool monotone = true;
  std::vector<Violation> violating_rounds;
  /// Largest prob_base - prob_perturbed over the compared rounds (0 if none
  /// is positive).
  double max_violation = 0.0;
};

/// Distributions emitted after each observed row.
template <FullInfoLearner L>
std::vector<Distribution> trajectory(L learner, const LossMatrix& losses) {
  std::vector<Distribution> out;
  out.reserve(losses.size());
  for (const auto& row : losses) out.push_back(learner.observe(row));
  return out;
}

namespace detail {

inline MonotonicityVerdict compare_probabilities(std::span<const double> base, std::span<const double> pert,
                                                 std::size_t first_round, double tol) {
  MonotonicityVerdict v;
  for (std::size_t r = 0; r < base.size(); ++r) {
    const double gap = base[r] - pert[r];
    v.max_violation = std::max(v.max_violation, gap);
    if (pert[r] < base[r] - tol) v.violating_rounds.push_back({first_round + r, base[r], pert[r]});
  }
  v.monotone = v.violating_rounds.empty();
  return v;
}

}  // namespace detail

/// Compares a deterministic full-information learner's probability of the
/// perturbed arm under both sequences.
template <typename Factory>
MonotonicityVerdict check_full_info(Factory&& make_learner, const PerturbationPair& pair, double tol) {
  pair.validate();
  const auto base_traj = trajectory(make_learner(), pair.base);
  const auto pert_traj = trajectory(make_learner(), pair.perturbed());
  std::vector<double> pb, pp;
  for (std::size_t t = pair.round; t < base_traj.size(); ++t) {
    pb.push_back(base_traj[t][pair.arm]);
    pp.push_back(pert_traj[t][pair.arm]);
  }
  return detail::compare_probabilities(pb, pp, pair.round + 1, tol);
}

/// Raised when an instance is too large for exhaustive branch enumeration.
class InstanceTooLarge : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Limits for exact enumeration of the exploration branches.
inline constexpr std::size_t kExactMaxHorizon = 6;
inline constexpr std::size_t kExactMaxArms = 3;

namespace detail {

template <FullInfoLearner Inner>
void accumulate_marginals(const MonoBandit<Inner>& state, const LossMatrix& losses, std::size_t t, double weight,
                          std::size_t arm, std::vector<double>& marginals) {
  if (t == losses.size() || weight == 0.0) return;
  const std::size_t k = state.num_arms();
  const double eps = state.epsilon();
  marginals[t] += weight * state.selection_distribution()[arm];
  // Exploit branch: the inner learner sees zeros.
  if (eps < 1.0) {
    MonoBandit<Inner> next = state;
    next.advance(std::nullopt, 0.0);
    accumulate_marginals(next, losses, t + 1, weight * (1.0 - eps), arm, marginals);
  }
  if (eps > 0.0) {
    for (std::size_t j = 0; j < k; ++j) {
      MonoBandit<Inner> next = state;
      next.advance(ExploreBranch{j}, losses[t][j]);
      accumulate_marginals(next, losses, t + 1, weight * eps / static_cast<double>(k), arm, marginals);
    }
  }
}

}  // namespace detail

/// Exact probability of playing `arm` in each round (0-based play rounds)
/// against an oblivious loss sequence, by enumerating all (k+1)^T branch
/// realizations of the exploration draws.
template <FullInfoLearner Inner>
std::vector<double> mono_bandit_exact_marginals(const MonoBandit<Inner>& initial, const LossMatrix& losses,
                                                std::size_t arm) {
  if (losses.size() > kExactMaxHorizon || initial.num_arms() > kExactMaxArms)
    throw InstanceTooLarge("exact enumeration limited to T <= 6, k <= 3; use the Monte Carlo check");
  std::vector<double> marginals(losses.size(), 0.0);
  detail::accumulate_marginals(initial, losses, 0, 1.0, arm, marginals);
  return marginals;
}

/// Exact monotonicity check of the bandit reduction. Play round t is
/// affected by the perturbation iff t > pair.round; the verdict reports
/// 1-based play rounds.
template <typename InnerFactory>
MonotonicityVerdict check_mono_bandit_exact(InnerFactory&& make_inner, double epsilon, const PerturbationPair& pair,
                                            double tol = 1e-12) {
  pair.validate();
  using Inner = std::remove_cvref_t<decltype(make_inner())>;
  const MonoBandit<Inner> init(make_inner(), epsilon);
  const auto mb = mono_bandit_exact_marginals(init, pair.base, pair.arm);
  const auto mp = mono_bandit_exact_marginals(MonoBandit<Inner>(make_inner(), epsilon), pair.perturbed(), pair.arm);
  std::vector<double> pb(mb.begin() + static_cast<std::ptrdiff_t>(pair.round) + 1, mb.end());
  std::vector<double> pp(mp.begin() + static_cast<std::ptrdiff_t>(pair.round) + 1, mp.end());
  return detail::compare_probabilities(pb, pp, pair.round + 2, tol);
}

struct MonteCarloOptions {
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
  /// One-sided normal quantile; 2.326 is the 99% level.
  double z = 2.3263478740408408;
};

/// Sampled monotonicity check for instances too large to enumerate. Both
/// sequences share every exploration and learner draw; on each sample path
/// the exact conditional selection probability is recorded. A round is
/// flagged only when the upper one-sided confidence bound of
/// (perturbed - base) is below zero.
template <typename InnerFactory>
MonotonicityVerdict check_mono_bandit_monte_carlo(InnerFactory&& make_inner, double epsilon,
                                                  const PerturbationPair& pair, const MonteCarloOptions& opts = {}) {
  pair.validate();
  using Inner = std::remove_cvref_t<decltype(make_inner())>;
  const auto pert = pair.perturbed();
  const std::size_t horizon = pair.horizon();
  const std::size_t k = pair.num_arms();
  std::vector<double> sum(horizon, 0.0), sum_sq(horizon, 0.0), base_mean(horizon, 0.0), pert_mean(horizon, 0.0);
  SeededRng rng(opts.seed, streams::kExploration);
  for (std::size_t s = 0; s < opts.samples; ++s) {
    MonoBandit<Inner> b(make_inner(), epsilon), p(make_inner(), epsilon);
    for (std::size_t t = 0; t < horizon; ++t) {
      const double qb = b.selection_distribution()[pair.arm];
      const double qp = p.selection_distribution()[pair.arm];
      const double d = qp - qb;
      sum[t] += d;
      sum_sq[t] += d * d;
      base_mean[t] += qb;
      pert_mean[t] += qp;
      const ExploreBranch branch = decode_explore_draw(rng.uniform01(), epsilon, k);
      b.advance(branch, branch ? pair.base[t][*branch] : 0.0);
      p.advance(branch, branch ? pert[t][*branch] : 0.0);
    }
  }
  MonotonicityVerdict v;
  const auto n = static_cast<double>(opts.samples);
  for (std::size_t t = pair.round + 1; t < horizon; ++t) {
    const double mean = sum[t] / n;
    const double var = std::max(0.0, sum_sq[t] / n - mean * mean);
    const double upper = mean + opts.z * std::sqrt(var / n);
    v.max_violation = std::max(v.max_violation, -mean);
    if (upper < 0.0) v.violating_rounds.push_back({t + 1, base_mean[t] / n, pert_mean[t] / n});
  }
  v.monotone = v.violating_rounds.empty();
  return v;
}

/// Random pair: T in [1, max_horizon], k in [2, max_arms], losses uniform on
/// `range`, a uniformly chosen cell decreased by delta in (0, range width].
inline PerturbationPair random_perturbation_pair(SeededRng& rng, std::size_t max_horizon, std::size_t max_arms,
                                                 LossRange range) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform01() * static_cast<double>(hi - lo + 1));
  };
  PerturbationPair pair;
  const std::size_t horizon = pick(1, max_horizon);
  const std::size_t k = pick(2, max_arms);
  pair.base.assign(horizon, std::vector<double>(k));
  for (auto& row : pair.base)
    for (double& x : row) x = range.lo + rng.uniform01() * range.width();
  pair.round = pick(0, horizon - 1);
  pair.arm = pick(0, k - 1);
  pair.delta = (1.0 - rng.uniform01()) * range.width();
  return pair;
}

}  // namespace monocontract
