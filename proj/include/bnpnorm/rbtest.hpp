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

// Relative belief test of multivariate normality.
//
// The squared Mahalanobis distances d are given a DP(a, chi-square(m))
// prior. Prior draws P and posterior draws P_d ~ DP(a + n, H_d) are scored
// by their Anderson-Darling distance to chi-square(m); the relative belief
// ratio at distance zero compares how much posterior and prior mass sit
// below a small prior quantile of that distance.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bnpnorm/dirichlet.hpp"
#include "bnpnorm/distance.hpp"
#include "bnpnorm/errors.hpp"
#include "bnpnorm/laws.hpp"
#include "bnpnorm/mahalanobis.hpp"
#include "bnpnorm/parallel.hpp"
#include "bnpnorm/rng.hpp"
#include "bnpnorm/specialfn.hpp"

namespace bnpnorm {

struct TestConfig {
  double a = 5.0;         // DP concentration
  std::size_t N = 500;    // atoms per DP approximation
  std::size_t r1 = 1000;  // prior replicates
  std::size_t r2 = 1000;  // posterior replicates
  std::size_t M = 20;     // quantile bins
  std::size_t i0 = 1;     // bin index of the "distance zero" region
  std::uint64_t seed = 0;
  // Worker threads (0 = all cores). Results do not depend on it.
  unsigned threads = 0;
  // Prior base law; chi-square(m) when unset. Anything else invites
  // prior-data conflict.
  std::optional<UnivariateLaw> base;

  [[nodiscard]] static std::size_t default_i0(std::size_t M) {
    return static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(M)));
  }

  void validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidConfig("a must be > 0");
    if (N < 1) throw InvalidConfig("N must be >= 1");
    if (r1 < 1 || r2 < 1) throw InvalidConfig("r1 and r2 must be >= 1");
    if (M < 2) throw InvalidConfig("M must be >= 2");
    if (i0 < 1 || i0 >= M) throw InvalidConfig("i0 must satisfy 1 <= i0 < M");
    if (base) {
      try {
        ::bnpnorm::validate(*base);
      } catch (const InvalidSpec& e) {
        throw InvalidConfig(std::string("base law: ") + e.what());
      }
    }
  }
};

struct DistanceSample {
  enum class Label { prior, posterior };
  std::vector<double> values;
  Label label = Label::prior;
};

struct Diagnostics {
  std::size_t n = 0;
  std::size_t m = 0;
  double a = 0.0;
  std::vector<std::string> warnings;
};

struct RBReport {
  double rb_at_zero = 0.0;
  double strength = 0.0;
  DistanceSample prior_distances;
  DistanceSample posterior_distances;
  std::vector<double> quantile_grid;  // M + 1 points, grid[0] = 0
  std::vector<double> rb_per_bin;     // M entries
  Diagnostics diagnostics;
};

// Empirical prior quantiles d_{i/M}, i = 0..M, by the inverse-cdf (type 1)
// rule; grid[0] = 0 and grid[M] is the prior maximum.
[[nodiscard]] inline std::vector<double> prior_quantile_grid(
    const DistanceSample& prior, std::size_t M) {
  if (prior.values.empty()) throw DomainError("prior distance sample is empty");
  if (M < 1) throw DomainError("need M >= 1");
  std::vector<double> sorted = prior.values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t r = sorted.size();
  std::vector<double> grid(M + 1, 0.0);
  for (std::size_t i = 1; i <= M; ++i) {
    grid[i] = sorted[(i * r + M - 1) / M - 1];
  }
  std::size_t run = 1;
  for (std::size_t i = 1; i <= M; ++i) {
    run = grid[i] == grid[i - 1] ? run + 1 : 1;
    if (2 * run > M) {
      std::ostringstream msg;
      msg << run << " consecutive prior quantiles coincide at " << grid[i]
          << "; the prior distance distribution collapsed (check a and N)";
      throw DegenerateGrid(msg.str());
    }
  }
  return grid;
}

// Relative belief ratio and strength from prior and posterior distance
// samples.
//
// With F the posterior empirical cdf, bin i covers (grid[i], grid[i+1]]
// (bin 0 includes 0, the last bin is open above so mass beyond the prior
// maximum is kept). rb_per_bin[i] = M * posterior mass of bin i and
// rb_at_zero = M * F(grid[i0]). The strength is the posterior mass of
// {rb <= rb_at_zero}: the zero region [0, grid[i0]] itself plus every bin
// i >= i0 whose ratio does not exceed rb_at_zero.
[[nodiscard]] inline RBReport rb_estimate(const DistanceSample& prior,
                                          const DistanceSample& posterior,
                                          const TestConfig& config) {
  if (posterior.values.empty()) {
    throw DomainError("posterior distance sample is empty");
  }
  const std::size_t M = config.M;
  if (config.i0 < 1 || config.i0 >= M) {
    throw InvalidConfig("i0 must satisfy 1 <= i0 < M");
  }
  RBReport report;
  report.quantile_grid = prior_quantile_grid(prior, M);
  const auto& grid = report.quantile_grid;

  std::vector<double> post = posterior.values;
  std::sort(post.begin(), post.end());
  const auto count_le = [&post](double x) {
    return static_cast<std::size_t>(
        std::upper_bound(post.begin(), post.end(), x) - post.begin());
  };
  const std::size_t total = post.size();
  std::vector<std::size_t> counts(M);
  std::size_t below = 0;
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t upto = i + 1 == M ? total : count_le(grid[i + 1]);
    counts[i] = upto - below;
    below = upto;
  }
  const std::size_t zero_count = count_le(grid[config.i0]);

  // M * count / total, in that order, so a full count gives exactly M
  const auto ratio = [M, total](std::size_t count) {
    return static_cast<double>(M) * static_cast<double>(count) /
           static_cast<double>(total);
  };
  report.rb_per_bin.resize(M);
  for (std::size_t i = 0; i < M; ++i) report.rb_per_bin[i] = ratio(counts[i]);
  report.rb_at_zero = ratio(zero_count);

  // ratios compared through integer counts: rb_i <= rb_0 <=> c_i <= c_0
  std::size_t strength_count = zero_count;
  for (std::size_t i = config.i0; i < M; ++i) {
    if (counts[i] <= zero_count) strength_count += counts[i];
  }
  report.strength =
      static_cast<double>(strength_count) / static_cast<double>(total);

  report.prior_distances = prior;
  report.prior_distances.label = DistanceSample::Label::prior;
  report.posterior_distances = posterior;
  report.posterior_distances.label = DistanceSample::Label::posterior;
  report.diagnostics.a = config.a;
  return report;
}

// Stream ids: prior replicate k uses k, posterior replicate k uses r1 + k.
[[nodiscard]] inline DistanceSample simulate_prior_distances(
    DegreesOfFreedom m, const TestConfig& config) {
  config.validate();
  const ChiSquare target(m);
  const BaseMeasure base =
      config.base ? BaseMeasure::prior(*config.base) : BaseMeasure::prior(m);
  DistanceSample out;
  out.label = DistanceSample::Label::prior;
  out.values.resize(config.r1);
  parallel_for(config.r1, config.threads, [&](std::size_t k) {
    RngStream rng(config.seed, k);
    out.values[k] = ad_distance(sample_dp(config.a, base, config.N, rng), target);
  });
  return out;
}

[[nodiscard]] inline DistanceSample simulate_posterior_distances(
    const std::vector<double>& d, DegreesOfFreedom m, const TestConfig& config) {
  config.validate();
  const ChiSquare target(m);
  const BaseMeasure base =
      config.base ? BaseMeasure::posterior(config.a, d, *config.base)
                  : BaseMeasure::posterior(config.a, d, m);
  const double concentration = config.a + static_cast<double>(d.size());
  DistanceSample out;
  out.label = DistanceSample::Label::posterior;
  out.values.resize(config.r2);
  parallel_for(config.r2, config.threads, [&](std::size_t k) {
    RngStream rng(config.seed, config.r1 + k);
    out.values[k] =
        ad_distance(sample_dp(concentration, base, config.N, rng), target);
  });
  return out;
}

namespace detail {
inline std::vector<std::string> data_warnings(std::size_t n, std::size_t m,
                                              double a) {
  std::vector<std::string> out;
  if (a > 0.5 * static_cast<double>(n)) {
    std::ostringstream msg;
    msg << "a = " << a << " exceeds 0.5 n = " << 0.5 * static_cast<double>(n)
        << "; the prior may overwhelm the data";
    out.push_back(msg.str());
  }
  if (n <= 30 || n <= m + 30) {
    std::ostringstream msg;
    msg << "chi-square approximation of squared Mahalanobis distances expects "
           "n > 30 and n - m > 30 (n = "
        << n << ", n - m = " << static_cast<long long>(n) - static_cast<long long>(m)
        << ")";
    out.push_back(msg.str());
  }
  return out;
}
}  // namespace detail

// Full test from already reduced squared distances of m-variate data.
[[nodiscard]] inline RBReport run_test_on_distances(const SquaredDistances& d,
                                                    DegreesOfFreedom m,
                                                    const TestConfig& config) {
  config.validate();
  const auto with_context = [](const char* stage, auto&& fn) {
    try {
      return fn();
    } catch (const DegenerateWeights& e) {
      throw DegenerateWeights(std::string(stage) + ": " + e.what());
    }
  };
  DistanceSample prior = with_context(
      "prior replicates", [&] { return simulate_prior_distances(m, config); });
  DistanceSample posterior = with_context("posterior replicates", [&] {
    return simulate_posterior_distances(d.values, m, config);
  });
  RBReport report = rb_estimate(prior, posterior, config);
  report.diagnostics.n = d.values.size();
  report.diagnostics.m = static_cast<std::size_t>(m.value());
  report.diagnostics.warnings =
      detail::data_warnings(report.diagnostics.n, report.diagnostics.m, config.a);
  if (d.ill_conditioned) {
    std::ostringstream msg;
    msg << "sample covariance is ill-conditioned (pivot ratio " << d.pivot_ratio
        << "); squared distances may be inaccurate";
    report.diagnostics.warnings.push_back(msg.str());
  }
  return report;
}

[[nodiscard]] inline RBReport run_test(const DataMatrix& data,
                                       const TestConfig& config) {
  config.validate();
  const SquaredDistances d = squared_mahalanobis(data);
  return run_test_on_distances(d, DegreesOfFreedom(static_cast<int>(data.m())),
                               config);
}

}  // namespace bnpnorm
