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

#include <concepts>
#include <functional>
#include <memory>
#include <span>
#include <utility>

#include "monocontract/core.hpp"

namespace monocontract {

/// A full-information learner: emits a distribution, then observes the
/// whole loss vector of the round.
template <typename L>
concept FullInfoLearner =
    std::copy_constructible<L> && requires(L& l, const L& cl, std::span<const double> loss) {
      { cl.num_arms() } -> std::convertible_to<std::size_t>;
      { cl.distribution() } -> std::convertible_to<const Distribution&>;
      { l.observe(loss) } -> std::convertible_to<const Distribution&>;
    };

/// Type-erased full-information learner with value semantics.
class AnyLearner {
 public:
  template <FullInfoLearner L>
    requires(!std::same_as<std::remove_cvref_t<L>, AnyLearner>)
  AnyLearner(L learner)  // NOLINT(google-explicit-constructor)
      : impl_(std::make_unique<Model<L>>(std::move(learner))) {}

  AnyLearner(const AnyLearner& other) : impl_(other.impl_->clone()) {}
  AnyLearner(AnyLearner&&) noexcept = default;
  AnyLearner& operator=(const AnyLearner& other) {
    if (this != &other) impl_ = other.impl_->clone();
    return *this;
  }
  AnyLearner& operator=(AnyLearner&&) noexcept = default;

  std::size_t num_arms() const { return impl_->num_arms(); }
  const Distribution& distribution() const { return impl_->distribution(); }
  const Distribution& observe(std::span<const double> loss) { return impl_->observe(loss); }

  /// Access to the wrapped learner when its type is known.
  template <FullInfoLearner L>
  const L* target() const {
    auto* m = dynamic_cast<const Model<L>*>(impl_.get());
    return m ? &m->learner : nullptr;
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual std::unique_ptr<Concept> clone() const = 0;
    virtual std::size_t num_arms() const = 0;
    virtual const Distribution& distribution() const = 0;
    virtual const Distribution& observe(std::span<const double> loss) = 0;
  };

  template <typename L>
  struct Model final : Concept {
    explicit Model(L l) : learner(std::move(l)) {}
    std::unique_ptr<Concept> clone() const override { return std::make_unique<Model>(learner); }
    std::size_t num_arms() const override { return learner.num_arms(); }
    const Distribution& distribution() const override { return learner.distribution(); }
    const Distribution& observe(std::span<const double> loss) override { return learner.observe(loss); }
    L learner;
  };

  std::unique_ptr<Concept> impl_;
};

static_assert(FullInfoLearner<AnyLearner>);

/// Produces fresh learners; used wherever an experiment needs to replay a
/// learner from its initial state.
using LearnerFactory = std::function<AnyLearner()>;

}  // namespace monocontract
