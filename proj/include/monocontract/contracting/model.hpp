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
/// Single-round contracting primitives: outcome model, payment contracts,
/// effort costs, agent beliefs and the myopic effort solver.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "monocontract/core.hpp"

namespace monocontract::contracting {

/// Indexed [agent][outcome][state].
using Tensor3 = std::vector<std::vector<std::vector<double>>>;

/// Outcome probabilities affine in effort:
/// p_{i,o}(a, y) = slope[i][o][y] * a + intercept[i][o][y].
class OutcomeModel {
 public:
  OutcomeModel() = default;

  OutcomeModel(std::vector<double> returns, Tensor3 slopes, Tensor3 intercepts)
      : returns_(std::move(returns)), slopes_(std::move(slopes)), intercepts_(std::move(intercepts)) {
    validate();
    order_.resize(returns_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return returns_[a] < returns_[b]; });
  }

  std::size_t num_outcomes() const noexcept { return returns_.size(); }
  std::size_t num_agents() const noexcept { return slopes_.size(); }
  std::size_t num_states() const noexcept { return slopes_.empty() ? 0 : slopes_[0][0].size(); }
  const std::vector<double>& returns() const noexcept { return returns_; }
  double return_of(std::size_t o) const { return returns_.at(o); }
  const Tensor3& slopes() const noexcept { return slopes_; }
  const Tensor3& intercepts() const noexcept { return intercepts_; }

  double probability(std::size_t i, std::size_t o, double a, std::size_t y) const {
    const double p = slopes_[i][o][y] * a + intercepts_[i][o][y];
    return std::clamp(p, 0.0, 1.0);
  }

  std::vector<double> probabilities(std::size_t i, double a, std::size_t y) const {
    check_index(i, y);
    std::vector<double> p(num_outcomes());
    for (std::size_t o = 0; o < p.size(); ++o) p[o] = probability(i, o, a, y);
    return p;
  }

  /// E[r] for agent i at effort a in state y.
  double expected_return(std::size_t i, double a, std::size_t y) const {
    check_index(i, y);
    double s = 0.0;
    for (std::size_t o = 0; o < num_outcomes(); ++o) s += probability(i, o, a, y) * returns_[o];
    return s;
  }

  /// sum_o slope[i][o][y] * r(o); non-negative by construction.
  double return_slope(std::size_t i, std::size_t y) const {
    check_index(i, y);
    double s = 0.0;
    for (std::size_t o = 0; o < num_outcomes(); ++o) s += slopes_[i][o][y] * returns_[o];
    return s;
  }

  /// Inverse-CDF outcome draw with outcomes ordered by increasing return, so
  /// that a fixed uniform maps higher effort to weakly higher returns
  /// whenever the low-return mass shrinks with effort.
  std::size_t sample_outcome(std::size_t i, double a, std::size_t y, double u) const {
    check_index(i, y);
    double cum = 0.0;
    std::size_t last = order_.back();
    for (std::size_t o : order_) {
      const double p = probability(i, o, a, y);
      if (p <= 0.0) continue;
      last = o;
      cum += p;
      if (u < cum) return o;
    }
    return last;
  }

 private:
  void check_index(std::size_t i, std::size_t y) const {
    if (i >= num_agents() || y >= num_states()) throw DomainError("OutcomeModel: agent or state out of range");
  }

  void validate() const {
    const std::size_t m = returns_.size();
    if (m == 0) throw DomainError("OutcomeModel: no outcomes");
    for (double r : returns_)
      if (!(r >= -1.0 && r <= 1.0)) throw DomainError("OutcomeModel: returns must lie in [-1, 1]");
    if (slopes_.empty() || slopes_.size() != intercepts_.size())
      throw DomainError("OutcomeModel: slope and intercept tensors differ in agent count");
    const std::size_t states = slopes_[0].empty() ? 0 : slopes_[0][0].size();
    if (states == 0) throw DomainError("OutcomeModel: empty state set");
    for (std::size_t i = 0; i < slopes_.size(); ++i) {
      if (slopes_[i].size() != m || intercepts_[i].size() != m)
        throw DomainError("OutcomeModel: outcome dimension mismatch for agent " + std::to_string(i));
      for (std::size_t o = 0; o < m; ++o)
        if (slopes_[i][o].size() != states || intercepts_[i][o].size() != states)
          throw DomainError("OutcomeModel: state dimension mismatch for agent " + std::to_string(i));
      for (std::size_t y = 0; y < states; ++y) {
        double at0 = 0.0, at1 = 0.0, drift = 0.0;
        for (std::size_t o = 0; o < m; ++o) {
          const double p0 = intercepts_[i][o][y];
          const double p1 = slopes_[i][o][y] + intercepts_[i][o][y];
          if (p0 < -kConstructionTol || p0 > 1.0 + kConstructionTol || p1 < -kConstructionTol ||
              p1 > 1.0 + kConstructionTol)
            throw DomainError("OutcomeModel: probability outside [0, 1] for agent " + std::to_string(i) +
                              ", outcome " + std::to_string(o) + ", state " + std::to_string(y));
          at0 += p0;
          at1 += p1;
          drift += slopes_[i][o][y] * returns_[o];
        }
        if (std::abs(at0 - 1.0) > 1e-9 || std::abs(at1 - 1.0) > 1e-9)
          throw DomainError("OutcomeModel: probabilities do not sum to one for agent " + std::to_string(i) +
                            ", state " + std::to_string(y));
        if (drift < -kConstructionTol)
          throw DomainError("OutcomeModel: expected return decreases with effort for agent " + std::to_string(i) +
                            ", state " + std::to_string(y));
      }
    }
  }

  std::vector<double> returns_;
  Tensor3 slopes_, intercepts_;
  std::vector<std::size_t> order_;
};

/// Point on a piecewise-linear function.
struct Knot {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Knot&, const Knot&) = default;
};

namespace detail {

inline double interpolate(const std::vector<Knot>& knots, double x) {
  if (x <= knots.front().x) return knots.front().y;
  if (x >= knots.back().x) return knots.back().y;
  const auto it = std::upper_bound(knots.begin(), knots.end(), x, [](double v, const Knot& k) { return v < k.x; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  return lo.y + (hi.y - lo.y) * (x - lo.x) / (hi.x - lo.x);
}

inline std::vector<double> knot_slopes(const std::vector<Knot>& knots, const char* what) {
  if (knots.size() < 2) throw DomainError(std::string(what) + ": need at least two knots");
  std::vector<double> s;
  for (std::size_t j = 1; j < knots.size(); ++j) {
    if (!(knots[j].x > knots[j - 1].x)) throw DomainError(std::string(what) + ": knots must increase strictly");
    s.push_back((knots[j].y - knots[j - 1].y) / (knots[j].x - knots[j - 1].x));
  }
  return s;
}

}  // namespace detail

/// Payment rule v(r).
class Contract {
 public:
  enum class Kind { kLinear, kPiecewiseConcave };

  static Contract linear(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("Contract: alpha must lie in [0, 1]");
    Contract c;
    c.kind_ = Kind::kLinear;
    c.alpha_ = alpha;
    return c;
  }

  /// Concave non-decreasing piecewise-linear payment through `knots`, which
  /// must cover [-1, 1]. The principal's share r - v(r) must stay in [-1, 1].
  static Contract piecewise_concave(std::vector<Knot> knots) {
    const auto s = detail::knot_slopes(knots, "Contract");
    if (knots.front().x > -1.0 || knots.back().x < 1.0) throw DomainError("Contract: knots must cover [-1, 1]");
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] < -kConstructionTol) throw DomainError("Contract: payment must be non-decreasing");
      if (j > 0 && s[j] > s[j - 1] + kConstructionTol) throw DomainError("Contract: payment must be concave");
    }
    Contract c;
    c.kind_ = Kind::kPiecewiseConcave;
    c.knots_ = std::move(knots);
    std::vector<double> probe{-1.0, 1.0};
    for (const auto& k : c.knots_)
      if (k.x > -1.0 && k.x < 1.0) probe.push_back(k.x);
    for (double r : probe) {
      const double u = r - c.pay(r);
      if (u < -1.0 - kConstructionTol || u > 1.0 + kConstructionTol)
        throw DomainError("Contract: principal share r - v(r) leaves [-1, 1]");
    }
    return c;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_linear() const noexcept { return kind_ == Kind::kLinear; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<Knot>& knots() const noexcept { return knots_; }

  double pay(double r) const { return is_linear() ? alpha_ * r : detail::interpolate(knots_, r); }

  /// Principal utility r - v(r) for an engaged agent.
  double principal_share(double r) const { return r - pay(r); }

 private:
  Kind kind_ = Kind::kLinear;
  double alpha_ = 0.0;
  std::vector<Knot> knots_;
};

/// Convex non-decreasing effort cost on [0, 1].
class Cost {
 public:
  enum class Kind { kLinear, kQuadratic, kPiecewise };

  static Cost linear(double c) {
    if (!(c >= 0.0)) throw DomainError("Cost: linear coefficient must be non-negative");
    return Cost(Kind::kLinear, c, {});
  }

  static Cost quadratic(double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("Cost: quadratic coefficient must be non-negative");
    return Cost(Kind::kQuadratic, gamma, {});
  }

  /// Piecewise-linear cost through `knots` spanning exactly [0, 1].
  static Cost piecewise(std::vector<Knot> knots) {
    const auto s = detail::knot_slopes(knots, "Cost");
    if (knots.front().x != 0.0 || knots.back().x != 1.0) throw DomainError("Cost: knots must span [0, 1]");
    Cost c(Kind::kPiecewise, 0.0, std::move(knots));
    c.validate_shape();
    return c;
  }

  Kind kind() const noexcept { return kind_; }
  double coefficient() const noexcept { return coef_; }
  const std::vector<Knot>& knots() const noexcept { return knots_; }

  double operator()(double a) const {
    switch (kind_) {
      case Kind::kLinear: return coef_ * a;
      case Kind::kQuadratic: return coef_ * a * a;
      case Kind::kPiecewise: return detail::interpolate(knots_, a);
    }
    return 0.0;
  }

 private:
  Cost(Kind kind, double coef, std::vector<Knot> knots) : kind_(kind), coef_(coef), knots_(std::move(knots)) {}

  void validate_shape() const {
    if ((*this)(0.0) < 0.0) throw DomainError("Cost: cost(0) must be non-negative");
    constexpr int kGrid = 100;
    std::vector<double> v(kGrid + 1);
    for (int j = 0; j <= kGrid; ++j) v[j] = (*this)(j / static_cast<double>(kGrid));
    for (int j = 1; j <= kGrid; ++j)
      if (v[j] < v[j - 1] - kConstructionTol) throw DomainError("Cost: must be non-decreasing");
    for (int j = 1; j < kGrid; ++j)
      if (v[j + 1] - 2 * v[j] + v[j - 1] < -kConstructionTol) throw DomainError("Cost: must be convex");
  }

  Kind kind_;
  double coef_;
  std::vector<Knot> knots_;
};

/// What an agent believes about the state of the current round.
class Belief {
 public:
  /// The agent knows each round's realized state.
  static Belief known() { return Belief{}; }
  /// The agent knows only the i.i.d. per-round state distribution.
  static Belief iid(Distribution q) {
    Belief b;
    b.dist_ = std::move(q);
    b.known_ = false;
    return b;
  }

  bool is_known() const noexcept { return known_; }
  const Distribution& distribution() const noexcept { return dist_; }

  Distribution for_round(std::size_t realized_state, std::size_t num_states) const {
    if (known_) return Distribution::point_mass(num_states, realized_state);
    if (dist_.size() != num_states) throw DomainError("Belief: distribution size differs from state count");
    return dist_;
  }

 private:
  bool known_ = true;
  Distribution dist_;
};

struct AgentSpec {
  Cost cost = Cost::linear(0.0);
  Belief belief = Belief::known();
};

/// E_y[ v-bar(i, a, y) ] - c(a): the agent's expected single-round utility
/// when engaged.
inline double myopic_objective(const AgentSpec& agent, const OutcomeModel& model, const Contract& contract,
                               std::size_t i, const Distribution& state_dist, double a) {
  double pay = 0.0;
  for (std::size_t y = 0; y < state_dist.size(); ++y) {
    if (state_dist[y] == 0.0) continue;
    for (std::size_t o = 0; o < model.num_outcomes(); ++o)
      pay += state_dist[y] * model.probability(i, o, a, y) * contract.pay(model.return_of(o));
  }
  return pay - agent.cost(a);
}

/// Slope of the expected payment in effort; the expected payment is affine
/// in effort because outcome probabilities are.
inline double payment_slope(const OutcomeModel& model, const Contract& contract, std::size_t i,
                            const Distribution& state_dist) {
  if (state_dist.size() != model.num_states()) throw DomainError("myopic: state distribution size mismatch");
  double s = 0.0;
  for (std::size_t y = 0; y < state_dist.size(); ++y)
    for (std::size_t o = 0; o < model.num_outcomes(); ++o)
      s += state_dist[y] * model.slopes()[i][o][y] * contract.pay(model.return_of(o));
  return s;
}

/// Smallest effort maximising the expected single-round utility.
inline double myopic_action(const AgentSpec& agent, const OutcomeModel& model, const Contract& contract,
                            std::size_t i, const Distribution& state_dist) {
  const double slope = payment_slope(model, contract, i, state_dist);
  const Cost& c = agent.cost;
  switch (c.kind()) {
    case Cost::Kind::kLinear:
      return slope > c.coefficient() ? 1.0 : 0.0;
    case Cost::Kind::kQuadratic:
      if (c.coefficient() == 0.0) return slope > 0.0 ? 1.0 : 0.0;
      return std::clamp(slope / (2.0 * c.coefficient()), 0.0, 1.0);
    case Cost::Kind::kPiecewise: {
      // Concave piecewise-linear objective: a knot attains the maximum.
      double best_val = -std::numeric_limits<double>::infinity();
      for (const auto& k : c.knots()) best_val = std::max(best_val, slope * k.x - k.y);
      for (const auto& k : c.knots())
        if (slope * k.x - k.y >= best_val - kConstructionTol) return k.x;
      return 0.0;
    }
  }
  return 0.0;
}

/// Effort rule of a simulated agent.
struct AgentPolicy {
  enum class Kind { kMyopic, kBoosted, kFixed };
  Kind kind = Kind::kMyopic;
  double value = 0.0;  // boost delta or fixed effort

  static AgentPolicy myopic() { return {}; }
  static AgentPolicy boosted(double delta) {
    if (!(delta >= 0.0)) throw DomainError("AgentPolicy: boost must be non-negative");
    return {Kind::kBoosted, delta};
  }
  static AgentPolicy fixed(double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("AgentPolicy: fixed effort must lie in [0, 1]");
    return {Kind::kFixed, a};
  }

  double effort(double myopic_effort) const {
    switch (kind) {
      case Kind::kMyopic: return myopic_effort;
      case Kind::kBoosted: return std::min(1.0, myopic_effort + value);
      case Kind::kFixed: return value;
    }
    return myopic_effort;
  }
};

}  // namespace monocontract::contracting
