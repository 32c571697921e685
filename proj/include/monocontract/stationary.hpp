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
#include <cstddef>
#include <span>
#include <vector>

#include "monocontract/core.hpp"

namespace monocontract {

struct StationaryOptions {
  std::size_t max_iterations = 1'000'000;
  double residual_tol = 1e-10;
  /// Largest k for which the direct solve fallback is attempted.
  std::size_t direct_solve_max_k = 64;
};

namespace detail {

// out = Q p with Q given by its columns.
inline void apply_columns(std::span<const Distribution> columns, std::span<const double> p,
                          std::vector<double>& out) {
  const std::size_t k = columns.size();
  out.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const double w = p[i];
    if (w == 0.0) continue;
    const auto col = columns[i].probs();
    for (std::size_t j = 0; j < k; ++j) out[j] += col[j] * w;
  }
}

inline double fixed_point_residual(std::span<const Distribution> columns, std::span<const double> p) {
  std::vector<double> qp;
  apply_columns(columns, p, qp);
  return max_abs_diff(qp, p);
}

// Solves (Q - I) p = 0 with sum(p) = 1 by replacing the last equation with the
// normalisation row; Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> direct_stationary(std::span<const Distribution> columns) {
  const std::size_t k = columns.size();
  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) a[j][i] = columns[i][j] - (i == j ? 1.0 : 0.0);
  for (std::size_t i = 0; i < k; ++i) a[k - 1][i] = 1.0;
  a[k - 1][k] = 1.0;

  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-14) return std::nullopt;
    std::swap(a[piv], a[c]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t cc = c; cc <= k; ++cc) a[r][cc] -= f * a[c][cc];
    }
  }
  std::vector<double> p(k);
  for (std::size_t i = 0; i < k; ++i) p[i] = std::max(0.0, a[i][k] / a[i][i]);
  return p;
}

}  // namespace detail

/// Fixed point p = Q p of the column-stochastic matrix whose i-th column is
/// `columns[i]`.
///
/// Power iteration from the uniform vector; the limit is the reported fixed
/// point, which fixes the choice when Q is reducible. If iteration stalls
/// (periodic chains) a direct linear solve is tried for small k. Throws
/// NumericalError carrying the best residual when neither reaches
/// `residual_tol`.
inline Distribution stationary_distribution(std::span<const Distribution> columns,
                                            const StationaryOptions& opts = {}) {
  const std::size_t k = columns.size();
  if (k == 0) throw DomainError("stationary_distribution: no columns");
  for (const auto& c : columns)
    if (c.size() != k) throw DomainError("stationary_distribution: matrix is not square");

  std::vector<double> p(k, 1.0 / static_cast<double>(k));
  std::vector<double> next;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    detail::apply_columns(columns, p, next);
    residual = max_abs_diff(next, p);
    if (residual <= opts.residual_tol) {
      // Report the iterate whose own residual is within tolerance.
      if (detail::fixed_point_residual(columns, next) <= opts.residual_tol) p.swap(next);
      return normalize(p);
    }
    p.swap(next);
  }

  if (k <= opts.direct_solve_max_k) {
    if (auto direct = detail::direct_stationary(columns)) {
      const double r = detail::fixed_point_residual(columns, *direct);
      if (r <= opts.residual_tol) return normalize(*direct);
      residual = std::min(residual, r);
    }
  }
  throw NumericalError("stationary_distribution: fixed point not found", residual);
}

}  // namespace monocontract
