// Copyright 2026 The bnpnorm Authors
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

// Distances between a discrete measure P_N and a continuous cdf G.
//
// With U_(i) = G(Y_(i)) and W_i = J'_1 + ... + J'_i, the Anderson-Darling
// distance reduces to the O(N) form
//
//   d_AD = sum_{i<N} W_i^2 log[U_(i+1)(1-U_(i)) / (U_(i)(1-U_(i+1)))]
//        + sum_{i<N} (2 W_i - 1) log[(1-U_(i+1)) / (1-U_(i))]
//        - 1 - log[U_(N)(1-U_(1))].
//
// The Cramer-von Mises distance integrates (P_N - G)^2 dG piecewise in the
// same coordinates and is kept as a cross-check instrument.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>

#include "bnpnorm/dirichlet.hpp"
#include "bnpnorm/errors.hpp"

namespace bnpnorm {

template <typename F>
concept CdfEvaluator = requires(const F& f, double x) {
  { f(x) } -> std::convertible_to<double>;
};

// cdf values are clamped to [kCdfClamp, 1 - kCdfClamp] before taking logs.
inline constexpr double kCdfClamp = 1e-15;

namespace detail {

inline void check_measure(std::span<const double> atoms,
                          std::span<const double> jumps) {
  if (atoms.empty()) throw DomainError("discrete measure has no atoms");
  if (atoms.size() != jumps.size()) {
    throw DomainError("atoms and jumps differ in length");
  }
}

template <CdfEvaluator Cdf>
double clamped_cdf(const Cdf& cdf, double x) {
  const double u = static_cast<double>(cdf(x));
  if (std::isnan(u)) throw DomainError("cdf returned NaN");
  return std::clamp(u, kCdfClamp, 1.0 - kCdfClamp);
}

inline void check_order(double previous, double current, std::size_t i) {
  if (current < previous) {
    throw DomainError("cdf values decrease at sorted atom " + std::to_string(i) +
                      "; the cdf is not monotone or atoms are unsorted");
  }
}

}  // namespace detail

// Anderson-Darling distance. `atoms` sorted ascending, `jumps` co-permuted.
template <CdfEvaluator Cdf>
[[nodiscard]] double ad_distance(std::span<const double> atoms,
                                 std::span<const double> jumps, const Cdf& cdf) {
  detail::check_measure(atoms, jumps);
  const std::size_t n = atoms.size();
  double u = detail::clamped_cdf(cdf, atoms[0]);
  double log_u = std::log(u);
  double log_1mu = std::log1p(-u);
  const double first_log_1mu = log_1mu;
  double w = 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w += jumps[i];
    const double next = detail::clamped_cdf(cdf, atoms[i + 1]);
    detail::check_order(u, next, i + 1);
    const double next_log_u = std::log(next);
    const double next_log_1mu = std::log1p(-next);
    const double tail = next_log_1mu - log_1mu;
    d += w * w * ((next_log_u - log_u) - tail) + (2.0 * w - 1.0) * tail;
    u = next;
    log_u = next_log_u;
    log_1mu = next_log_1mu;
  }
  d += -1.0 - log_u - first_log_1mu;
  return std::max(0.0, d);
}

template <CdfEvaluator Cdf>
[[nodiscard]] double ad_distance(const DPApproximation& p, const Cdf& cdf) {
  return ad_distance(std::span<const double>(p.atoms),
                     std::span<const double>(p.jumps), cdf);
}

// Cramer-von Mises distance, integral of (P_N - G)^2 dG.
template <CdfEvaluator Cdf>
[[nodiscard]] double cvm_distance(std::span<const double> atoms,
                                  std::span<const double> jumps, const Cdf& cdf) {
  detail::check_measure(atoms, jumps);
  const std::size_t n = atoms.size();
  double u = detail::clamped_cdf(cdf, atoms[0]);
  double d = u * u * u;
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w += jumps[i];
    const double next = detail::clamped_cdf(cdf, atoms[i + 1]);
    detail::check_order(u, next, i + 1);
    const double hi = next - w;
    const double lo = u - w;
    d += hi * hi * hi - lo * lo * lo;
    u = next;
  }
  const double top = 1.0 - u;
  d += top * top * top;
  return std::max(0.0, d / 3.0);
}

template <CdfEvaluator Cdf>
[[nodiscard]] double cvm_distance(const DPApproximation& p, const Cdf& cdf) {
  return cvm_distance(std::span<const double>(p.atoms),
                      std::span<const double>(p.jumps), cdf);
}

// Prior moments of d_AD(P, H) for P ~ DP(a, H):
//   E = 1/(a+1),
//   Var = 2((pi^2-9)a^2 + (30-2pi^2)a - 3pi^2 + 36) / (3(a+1)^2(a+2)(a+3)).
[[nodiscard]] inline double ad_prior_mean(double a) {
  if (!(a > 0.0)) throw DomainError("need a > 0");
  return 1.0 / (a + 1.0);
}

[[nodiscard]] inline double ad_prior_variance(double a) {
  if (!(a > 0.0)) throw DomainError("need a > 0");
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double num = 2.0 * ((pi2 - 9.0) * a * a + (30.0 - 2.0 * pi2) * a -
                            3.0 * pi2 + 36.0);
  return num / (3.0 * (a + 1.0) * (a + 1.0) * (a + 2.0) * (a + 3.0));
}

// E d_CvM(P, H) = 1/(6(a+1)).
[[nodiscard]] inline double cvm_prior_mean(double a) {
  if (!(a > 0.0)) throw DomainError("need a > 0");
  return 1.0 / (6.0 * (a + 1.0));
}

}  // namespace bnpnorm
