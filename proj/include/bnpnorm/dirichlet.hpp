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

// Finite approximation of a Dirichlet process draw,
//
//   P_N = sum_i J_i delta_{Y_i},   Y_i iid H,
//   J_i proportional to the (1 - Gamma_i / Gamma_{N+1}) quantile of
//   gamma(a / N, 1), Gamma_i = E_1 + ... + E_i, E_i iid exponential(1).
//
// Weights are computed as log quantiles and normalized with a max shift,
// so shapes a/N as small as 1e-4 do not underflow.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bnpnorm/errors.hpp"
#include "bnpnorm/laws.hpp"
#include "bnpnorm/rng.hpp"
#include "bnpnorm/specialfn.hpp"

namespace bnpnorm {

// Base measure of a Dirichlet process: either the prior law H, or the
// posterior mixture H_d = a/(a+n) H + n/(a+n) F_n with F_n the empirical
// distribution of the observed squared distances d.
class BaseMeasure {
 public:
  static BaseMeasure prior(DegreesOfFreedom m) {
    return BaseMeasure(ChiSquareLaw{static_cast<double>(m.value())}, 0.0, {});
  }
  static BaseMeasure prior(UnivariateLaw law) {
    return BaseMeasure(std::move(law), 0.0, {});
  }
  static BaseMeasure posterior(double a, std::vector<double> d, DegreesOfFreedom m) {
    return posterior(a, std::move(d), ChiSquareLaw{static_cast<double>(m.value())});
  }
  static BaseMeasure posterior(double a, std::vector<double> d, UnivariateLaw law) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw DomainError("posterior base measure needs a > 0");
    }
    if (d.empty()) throw DomainError("posterior base measure needs data");
    return BaseMeasure(std::move(law), a, std::move(d));
  }

  [[nodiscard]] bool is_posterior() const noexcept { return !data_.empty(); }
  [[nodiscard]] const UnivariateLaw& law() const noexcept { return law_; }
  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

  // Probability a/(a+n) of drawing from H rather than from the data.
  [[nodiscard]] double law_weight() const noexcept {
    if (!is_posterior()) return 1.0;
    return a_ / (a_ + static_cast<double>(data_.size()));
  }

  [[nodiscard]] double draw(RngStream& rng) const {
    if (is_posterior() && rng.uniform() >= law_weight()) {
      return data_[rng.index(data_.size())];
    }
    return draw_law(rng);
  }

  // One draw from H alone. Chi-square laws are sampled by inverting the cdf.
  [[nodiscard]] double draw_law(RngStream& rng) const {
    if (chi_square_) {
      const double u = rng.uniform();
      return 2.0 * std::exp(chi_square_->log_quantile(std::log(u), std::log1p(-u)));
    }
    return ::bnpnorm::draw(law_, rng);
  }

 private:
  BaseMeasure(UnivariateLaw law, double a, std::vector<double> d)
      : law_(std::move(law)), a_(a), data_(std::move(d)) {
    validate(law_);
    if (const auto* c = std::get_if<ChiSquareLaw>(&law_)) {
      chi_square_.emplace(0.5 * c->df);
    }
  }

  UnivariateLaw law_;
  double a_;
  std::vector<double> data_;
  std::optional<GammaQuantileSolver> chi_square_;
};

// Sorted atoms Y_(1) <= ... <= Y_(N) with their jumps J'_1..J'_N.
struct DPApproximation {
  std::vector<double> atoms;
  std::vector<double> jumps;

  [[nodiscard]] std::size_t size() const noexcept { return atoms.size(); }
};

// Algorithm weights J_1 >= ... >= J_N in generation order, summing to one.
// Consumes N + 1 exponentials from rng.
[[nodiscard]] inline std::vector<double> dp_weights(double a, std::size_t N,
                                                    RngStream& rng) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("need a > 0");
  if (N == 0) throw DomainError("need N >= 1");
  const double shape = a / static_cast<double>(N);
  if (!(shape > 0.0)) {
    throw DegenerateWeights("a/N underflows to zero; N is too large for a");
  }
  std::vector<double> e(N + 1);
  for (auto& v : e) v = rng.exponential();

  // prefix Gamma_i and the exact complement Gamma_{N+1} - Gamma_i
  std::vector<double> prefix(N + 1);
  std::partial_sum(e.begin(), e.end(), prefix.begin());
  std::vector<double> suffix(N + 1, 0.0);
  for (std::size_t i = N; i-- > 0;) suffix[i] = suffix[i + 1] + e[i + 1];
  const double log_total = std::log(prefix[N]);

  const GammaQuantileSolver solver(shape);
  std::vector<double> w(N);
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i) {
    const double log_upper = std::log(prefix[i]) - log_total;
    const double log_lower = std::log(suffix[i]) - log_total;
    // quantiles decrease in i; clamp solver round-off
    running = std::min(running, solver.log_quantile(log_lower, log_upper));
    w[i] = running;
  }
  const double top = w.front();
  if (!std::isfinite(top)) {
    throw DegenerateWeights("every raw weight underflowed (a = " +
                            std::to_string(a) + ", N = " + std::to_string(N) + ")");
  }
  double sum = 0.0;
  for (auto& v : w) {
    v = std::isnan(v) ? 0.0 : std::exp(v - top);
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

// One approximate draw from DP(a, base) with N atoms.
[[nodiscard]] inline DPApproximation sample_dp(double a, const BaseMeasure& base,
                                               std::size_t N, RngStream& rng) {
  if (N == 0) throw DomainError("need N >= 1");
  std::vector<double> atoms(N);
  for (auto& y : atoms) y = base.draw(rng);
  std::vector<double> weights = dp_weights(a, N, rng);

  std::vector<std::pair<double, double>> pairs(N);
  for (std::size_t i = 0; i < N; ++i) pairs[i] = {atoms[i], weights[i]};
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  DPApproximation out;
  out.atoms.resize(N);
  out.jumps.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    out.atoms[i] = pairs[i].first;
    out.jumps[i] = pairs[i].second;
  }
  return out;
}

}  // namespace bnpnorm
