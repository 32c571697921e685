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
/// Foundational types shared by every learner and simulator: probability
/// vectors, bounded loss vectors, named random streams, bandit transcripts
/// and the adaptive-adversary interface.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace monocontract {

// Errors ---------------------------------------------------------------------

/// Input outside an operation's domain (negative mass, wrong length, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Invalid or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tolerance applied when a Distribution is built.
inline constexpr double kConstructionTol = 1e-12;
/// Tolerance for downstream probability assertions.
inline constexpr double kAssertTol = 1e-9;

// Distribution ---------------------------------------------------------------

/// Probability vector over a finite set of arms. Entries lie in [0, 1] and
/// sum to one within kConstructionTol.
class Distribution {
 public:
  Distribution() = default;

  /// Validates `probs` as-is (no rescaling beyond absorbing rounding).
  static Distribution from_probs(std::vector<double> probs) {
    if (probs.empty()) throw DomainError("distribution must have at least one entry");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || p > 1.0 + kConstructionTol)
        throw DomainError("probability entry outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw DomainError("probabilities do not sum to one");
    Distribution d;
    d.probs_ = std::move(probs);
    d.renormalize();
    return d;
  }

  static Distribution uniform(std::size_t k) {
    if (k == 0) throw DomainError("distribution must have at least one entry");
    Distribution d;
    d.probs_.assign(k, 1.0 / static_cast<double>(k));
    return d;
  }

  static Distribution point_mass(std::size_t k, std::size_t arm) {
    if (arm >= k) throw DomainError("point mass outside support");
    Distribution d;
    d.probs_.assign(k, 0.0);
    d.probs_[arm] = 1.0;
    return d;
  }

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<double>& vector() const noexcept { return probs_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  friend Distribution normalize(std::span<const double> raw);

  void renormalize() {
    double sum = 0.0;
    for (double p : probs_) sum += p;
    for (double& p : probs_) p = std::min(1.0, p / sum);
  }

  std::vector<double> probs_;
};

/// Rescales a non-negative vector with positive total mass to a
/// Distribution.
inline Distribution normalize(std::span<const double> raw) {
  if (raw.empty()) throw DomainError("normalize: empty input");
  double sum = 0.0;
  for (double x : raw) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw DomainError("normalize: entries must be finite and non-negative");
    sum += x;
  }
  if (!(sum > 0.0)) throw DomainError("normalize: total mass is zero");
  Distribution d;
  d.probs_.reserve(raw.size());
  for (double x : raw) d.probs_.push_back(x / sum);
  d.renormalize();
  return d;
}

inline Distribution normalize(std::initializer_list<double> raw) {
  return normalize(std::span<const double>(raw.begin(), raw.size()));
}

/// Maximum absolute coordinate difference.
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// LossVector -----------------------------------------------------------------

/// Closed interval of admissible loss values.
struct LossRange {
  double lo = 0.0;
  double hi = 1.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  friend bool operator==(const LossRange&, const LossRange&) = default;
};

/// One round of losses, every entry inside a declared range.
class LossVector {
 public:
  LossVector(std::vector<double> losses, LossRange range)
      : losses_(std::move(losses)), range_(range) {
    if (!(range_.lo <= range_.hi)) throw DomainError("loss range must satisfy lo <= hi");
    for (double l : losses_)
      if (!std::isfinite(l) || !range_.contains(l))
        throw DomainError("loss outside declared range");
  }

  std::size_t size() const noexcept { return losses_.size(); }
  double operator[](std::size_t i) const { return losses_[i]; }
  std::span<const double> values() const noexcept { return losses_; }
  LossRange range() const noexcept { return range_; }

 private:
  std::vector<double> losses_;
  LossRange range_;
};

// Seeded randomness ----------------------------------------------------------

namespace detail {

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Well-known stream labels. The learner-internal stream (R_f) and the
/// bandit exploration stream (R_b) must never share an engine.
namespace streams {
inline constexpr std::string_view kLearner = "learner";
inline constexpr std::string_view kExploration = "exploration";
inline constexpr std::string_view kOutcome = "outcome";
inline constexpr std::string_view kData = "data";
}  // namespace streams

/// Identifies one draw: which stream and its ordinal within that stream.
struct DrawId {
  std::string stream;
  std::uint64_t index = 0;
  friend bool operator==(const DrawId&, const DrawId&) = default;
};

/// A 64-bit Mersenne Twister keyed by (seed, stream label). Uniform variates
/// are produced from raw engine output with a fixed bit recipe, so sequences
/// are identical across standard library implementations.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::string_view stream)
      : seed_(seed),
        stream_(stream),
        engine_(detail::splitmix64(seed ^ detail::splitmix64(detail::fnv1a(stream)))) {}

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& stream() const noexcept { return stream_; }
  std::uint64_t draws() const noexcept { return draws_; }

  /// Identifier of the next draw this stream will produce.
  DrawId next_id() const { return DrawId{stream_, draws_}; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::string stream_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// Inverse-CDF lookup of a uniform variate. Zero-probability arms are never
/// returned.
inline std::size_t sample_with_uniform(const Distribution& d, double u) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] <= 0.0) continue;
    last_positive = i;
    cum += d[i];
    if (u < cum) return i;
  }
  return last_positive;
}

/// Draws an arm from `d`, advancing `rng` by exactly one draw.
inline std::size_t sample(const Distribution& d, SeededRng& rng) {
  return sample_with_uniform(d, rng.uniform01());
}

// Transcript -----------------------------------------------------------------

struct TranscriptRound {
  std::size_t arm = 0;
  double observed_loss = 0.0;
  std::optional<bool> explored;
  std::vector<DrawId> draws;
  friend bool operator==(const TranscriptRound&, const TranscriptRound&) = default;
};

/// Learner-side history: only the selected arm's loss is kept.
class OnlineTranscript {
 public:
  explicit OnlineTranscript(std::size_t horizon) : horizon_(horizon) {}

  void push(TranscriptRound r) {
    if (rounds_.size() >= horizon_) throw DomainError("transcript exceeds horizon");
    rounds_.push_back(std::move(r));
  }

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return rounds_.size(); }
  const TranscriptRound& operator[](std::size_t t) const { return rounds_[t]; }
  std::span<const TranscriptRound> rounds() const noexcept { return rounds_; }

  /// Copy of the first `t` rounds.
  OnlineTranscript prefix(std::size_t t) const {
    OnlineTranscript p(horizon_);
    p.rounds_.assign(rounds_.begin(), rounds_.begin() + static_cast<std::ptrdiff_t>(std::min(t, rounds_.size())));
    return p;
  }

  friend bool operator==(const OnlineTranscript&, const OnlineTranscript&) = default;

 private:
  std::size_t horizon_;
  std::vector<TranscriptRound> rounds_;
};

/// Loss rule that sees the transcript of completed rounds only. The round-t
/// loss is requested before any round-t randomness is drawn.
class AdaptiveAdversary {
 public:
  using Rule = std::function<std::vector<double>(const OnlineTranscript& prefix)>;

  AdaptiveAdversary(std::size_t k, LossRange range, Rule rule)
      : k_(k), range_(range), rule_(std::move(rule)) {}

  LossVector next(const OnlineTranscript& prefix) const {
    LossVector l(rule_(prefix), range_);
    if (l.size() != k_) throw DomainError("adversary produced wrong number of losses");
    return l;
  }

  std::size_t num_arms() const noexcept { return k_; }
  LossRange range() const noexcept { return range_; }

 private:
  std::size_t k_;
  LossRange range_;
  Rule rule_;
};

}  // namespace monocontract
