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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bnpnorm/rbtest.hpp"
#include "bnpnorm/simgen.hpp"
#include "bnpnorm/specialfn.hpp"

namespace {

using bnpnorm::DegreesOfFreedom;
using bnpnorm::DistanceSample;
using bnpnorm::RngStream;
using bnpnorm::TestConfig;

DistanceSample sample(std::vector<double> v, DistanceSample::Label label) {
  DistanceSample s;
  s.values = std::move(v);
  s.label = label;
  return s;
}

DistanceSample prior_of(std::vector<double> v) {
  return sample(std::move(v), DistanceSample::Label::prior);
}

DistanceSample posterior_of(std::vector<double> v) {
  return sample(std::move(v), DistanceSample::Label::posterior);
}

TEST(QuantileGrid, OneToTwenty) {
  std::vector<double> v(20);
  std::iota(v.begin(), v.end(), 1.0);
  std::reverse(v.begin(), v.end());
  const auto grid = bnpnorm::prior_quantile_grid(prior_of(v), 20);
  ASSERT_EQ(grid.size(), 21u);
  for (std::size_t i = 0; i <= 20; ++i) EXPECT_EQ(grid[i], static_cast<double>(i));
}

TEST(QuantileGrid, MatchesSortOracle) {
  RngStream rng(61, 0);
  for (const std::size_t r : {7u, 100u, 999u, 1000u}) {
    for (const std::size_t M : {2u, 5u, 20u}) {
      std::vector<double> v(r);
      for (auto& x : v) x = rng.exponential();
      auto sorted = v;
      std::sort(sorted.begin(), sorted.end());
      const auto grid = bnpnorm::prior_quantile_grid(prior_of(v), M);
      EXPECT_EQ(grid.front(), 0.0);
      EXPECT_EQ(grid.back(), sorted.back());
      for (std::size_t i = 1; i <= M; ++i) {
        // smallest sample value with empirical cdf >= i/M
        std::size_t k = 0;
        while (static_cast<double>(k + 1) * static_cast<double>(M) <
               static_cast<double>(i) * static_cast<double>(r)) {
          ++k;
        }
        EXPECT_EQ(grid[i], sorted[k]) << "r=" << r << " M=" << M << " i=" << i;
      }
    }
  }
}

TEST(QuantileGrid, CollapsedPriorIsDegenerate) {
  EXPECT_THROW((void)bnpnorm::prior_quantile_grid(prior_of(std::vector<double>(50, 0.3)), 20),
               bnpnorm::DegenerateGrid);
  // a few ties are fine
  std::vector<double> v(40, 1.0);
  for (std::size_t i = 0; i < 30; ++i) v[i] = static_cast<double>(i) + 2.0;
  EXPECT_NO_THROW((void)bnpnorm::prior_quantile_grid(prior_of(v), 20));
  EXPECT_THROW((void)bnpnorm::prior_quantile_grid(prior_of({}), 20), bnpnorm::DomainError);
}

TEST(RbEstimate, HandWorkedExample) {
  TestConfig config;
  config.M = 5;
  config.i0 = 1;
  const auto report = bnpnorm::rb_estimate(
      prior_of({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}),
      posterior_of({0.05, 0.05, 0.15, 0.95}), config);
  const std::vector<double> grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  EXPECT_EQ(report.quantile_grid, grid);
  EXPECT_DOUBLE_EQ(report.rb_at_zero, 3.75);
  EXPECT_DOUBLE_EQ(report.strength, 1.0);
  const std::vector<double> bins = {3.75, 0.0, 0.0, 0.0, 1.25};
  EXPECT_EQ(report.rb_per_bin, bins);
  EXPECT_EQ(report.prior_distances.label, DistanceSample::Label::prior);
  EXPECT_EQ(report.posterior_distances.label, DistanceSample::Label::posterior);
}

TEST(RbEstimate, IdenticalSamplesGiveUnitRatios) {
  std::vector<double> v(400);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(static_cast<double>(i) + 1.0);
  TestConfig config;
  config.M = 20;
  config.i0 = 1;
  const auto report = bnpnorm::rb_estimate(prior_of(v), posterior_of(v), config);
  for (const double rb : report.rb_per_bin) EXPECT_DOUBLE_EQ(rb, 1.0);
  EXPECT_DOUBLE_EQ(report.rb_at_zero, 1.0);
  EXPECT_DOUBLE_EQ(report.strength, 1.0);
}

TEST(RbEstimate, AllMassNearZero) {
  std::vector<double> prior(100);
  std::iota(prior.begin(), prior.end(), 1.0);
  TestConfig config;
  config.M = 10;
  config.i0 = 2;
  const auto report =
      bnpnorm::rb_estimate(prior_of(prior), posterior_of(std::vector<double>(30, 0.5)), config);
  EXPECT_DOUBLE_EQ(report.rb_at_zero, 10.0);
  EXPECT_DOUBLE_EQ(report.strength, 1.0);
}

TEST(RbEstimate, AllMassFarAway) {
  std::vector<double> prior(100);
  std::iota(prior.begin(), prior.end(), 1.0);
  TestConfig config;
  config.M = 10;
  config.i0 = 1;
  const auto report =
      bnpnorm::rb_estimate(prior_of(prior), posterior_of(std::vector<double>(30, 1e3)), config);
  EXPECT_DOUBLE_EQ(report.rb_at_zero, 0.0);
  EXPECT_DOUBLE_EQ(report.rb_per_bin.back(), 10.0);
  // only the empty bins share the zero ratio
  EXPECT_DOUBLE_EQ(report.strength, 0.0);
}

TEST(RbEstimate, RangesAndNormalization) {
  RngStream rng(62, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t M = 2 + rng.index(30);
    TestConfig config;
    config.M = M;
    config.i0 = 1 + rng.index(M - 1);
    std::vector<double> prior(50 + rng.index(500));
    std::vector<double> post(1 + rng.index(500));
    const double shift = 3.0 * rng.uniform();
    for (auto& x : prior) x = rng.exponential();
    for (auto& x : post) x = shift * rng.exponential();
    const auto report = bnpnorm::rb_estimate(prior_of(prior), posterior_of(post), config);
    EXPECT_GE(report.rb_at_zero, 0.0);
    EXPECT_LE(report.rb_at_zero, static_cast<double>(M));
    EXPECT_GE(report.strength, 0.0);
    EXPECT_LE(report.strength, 1.0);
    const double total =
        std::accumulate(report.rb_per_bin.begin(), report.rb_per_bin.end(), 0.0);
    EXPECT_NEAR(total / static_cast<double>(M), 1.0, 1e-12);
    // strength is at least the zero-region mass
    EXPECT_GE(report.strength + 1e-15, report.rb_at_zero / static_cast<double>(M));
  }
}

TEST(RbEstimate, RejectsBadInput) {
  TestConfig config;
  config.M = 5;
  config.i0 = 5;
  EXPECT_THROW((void)bnpnorm::rb_estimate(prior_of({1, 2, 3}), posterior_of({1}), config),
               bnpnorm::InvalidConfig);
  config.i0 = 1;
  EXPECT_THROW((void)bnpnorm::rb_estimate(prior_of({1, 2, 3}), posterior_of({}), config),
               bnpnorm::DomainError);
}

TEST(TestConfigValidation, RejectsEachBadField) {
  const auto bad = [](auto mutate) {
    TestConfig c;
    mutate(c);
    return c;
  };
  EXPECT_NO_THROW(TestConfig{}.validate());
  EXPECT_THROW(bad([](TestConfig& c) { c.a = 0.0; }).validate(), bnpnorm::InvalidConfig);
  EXPECT_THROW(bad([](TestConfig& c) { c.a = INFINITY; }).validate(), bnpnorm::InvalidConfig);
  EXPECT_THROW(bad([](TestConfig& c) { c.N = 0; }).validate(), bnpnorm::InvalidConfig);
  EXPECT_THROW(bad([](TestConfig& c) { c.r1 = 0; }).validate(), bnpnorm::InvalidConfig);
  EXPECT_THROW(bad([](TestConfig& c) { c.r2 = 0; }).validate(), bnpnorm::InvalidConfig);
  EXPECT_THROW(bad([](TestConfig& c) { c.M = 1; }).validate(), bnpnorm::InvalidConfig);
  EXPECT_THROW(bad([](TestConfig& c) { c.i0 = 0; }).validate(), bnpnorm::InvalidConfig);
  EXPECT_THROW(bad([](TestConfig& c) { c.i0 = c.M; }).validate(), bnpnorm::InvalidConfig);
  EXPECT_THROW(bad([](TestConfig& c) { c.base = bnpnorm::NormalLaw{0.0, -1.0}; }).validate(),
               bnpnorm::InvalidConfig);
  EXPECT_EQ(TestConfig::default_i0(20), 1u);
  EXPECT_EQ(TestConfig::default_i0(100), 5u);
  EXPECT_EQ(TestConfig::default_i0(30), 2u);
}

TestConfig small_config() {
  TestConfig config;
  config.a = 5.0;
  config.N = 200;
  config.r1 = 400;
  config.r2 = 400;
  config.M = 20;
  config.i0 = 1;
  config.seed = 17;
  return config;
}

bnpnorm::SquaredDistances chi2_like(std::size_t n, int m, double stretch) {
  const bnpnorm::ChiSquare g{DegreesOfFreedom(m)};
  bnpnorm::SquaredDistances d;
  for (std::size_t i = 0; i < n; ++i) {
    d.values.push_back(stretch * g.quantile((static_cast<double>(i) + 0.5) / n));
  }
  return d;
}

TEST(RunTest, ResultDoesNotDependOnThreads) {
  auto config = small_config();
  const auto d = chi2_like(60, 3, 1.0);
  config.threads = 1;
  const auto one = bnpnorm::run_test_on_distances(d, DegreesOfFreedom(3), config);
  config.threads = 4;
  const auto four = bnpnorm::run_test_on_distances(d, DegreesOfFreedom(3), config);
  EXPECT_EQ(one.prior_distances.values, four.prior_distances.values);
  EXPECT_EQ(one.posterior_distances.values, four.posterior_distances.values);
  EXPECT_EQ(one.rb_at_zero, four.rb_at_zero);
  EXPECT_EQ(one.strength, four.strength);
}

TEST(RunTest, PriorAgainstItselfIsUninformative) {
  // Two independent prior samples: the ratio at zero should hover near 1.
  auto config = small_config();
  config.r1 = 4000;
  const auto prior = bnpnorm::simulate_prior_distances(DegreesOfFreedom(2), config);
  config.seed = 18;
  config.r1 = 4000;
  auto other = bnpnorm::simulate_prior_distances(DegreesOfFreedom(2), config);
  other.label = DistanceSample::Label::posterior;
  config.M = 10;
  const auto report = bnpnorm::rb_estimate(prior, other, config);
  // zero region holds 10% of the prior; binomial SE of M * fraction is ~0.05
  EXPECT_NEAR(report.rb_at_zero, 1.0, 0.25);
}

TEST(RunTest, SeparatesMatchingAndStretchedData) {
  auto config = small_config();
  config.a = 15.0;
  const auto good = bnpnorm::run_test_on_distances(chi2_like(100, 2, 1.0), DegreesOfFreedom(2),
                                                   config);
  EXPECT_GT(good.rb_at_zero, 1.0);
  const auto bad = bnpnorm::run_test_on_distances(chi2_like(100, 2, 5.0), DegreesOfFreedom(2),
                                                  config);
  EXPECT_LT(bad.rb_at_zero, 1.0);
  EXPECT_LT(bad.strength, 0.5);
}

TEST(RunTest, Warnings) {
  auto config = small_config();
  config.a = 40.0;
  auto d = chi2_like(20, 2, 1.0);
  d.ill_conditioned = true;
  d.pivot_ratio = 1e13;
  const auto report = bnpnorm::run_test_on_distances(d, DegreesOfFreedom(2), config);
  ASSERT_EQ(report.diagnostics.warnings.size(), 3u);
  EXPECT_NE(report.diagnostics.warnings[0].find("overwhelm"), std::string::npos);
  EXPECT_NE(report.diagnostics.warnings[1].find("n > 30"), std::string::npos);
  EXPECT_NE(report.diagnostics.warnings[2].find("ill-conditioned"), std::string::npos);

  config.a = 5.0;
  const auto quiet =
      bnpnorm::run_test_on_distances(chi2_like(100, 2, 1.0), DegreesOfFreedom(2), config);
  EXPECT_TRUE(quiet.diagnostics.warnings.empty());
  EXPECT_EQ(quiet.diagnostics.n, 100u);
  EXPECT_EQ(quiet.diagnostics.m, 2u);
}

TEST(RunTest, SingleAtomApproximationStillRuns) {
  auto config = small_config();
  config.N = 1;  // point-mass distances are still continuously distributed
  EXPECT_NO_THROW(
      (void)bnpnorm::run_test_on_distances(chi2_like(50, 2, 1.0), DegreesOfFreedom(2), config));
}

TEST(RbEstimate, HalvesOfOnePriorSampleAreCalibrated) {
  auto config = small_config();
  config.r1 = 2000;
  const auto whole = bnpnorm::simulate_prior_distances(DegreesOfFreedom(2), config);
  const std::vector<double> first(whole.values.begin(), whole.values.begin() + 1000);
  const std::vector<double> second(whole.values.begin() + 1000, whole.values.end());
  config.M = 20;
  const auto report = bnpnorm::rb_estimate(prior_of(first), posterior_of(second), config);
  // Binomial(1000, 1/M) scaled by M / 1000; the edges are quantiles of the
  // other half, which adds an equal variance term.
  const double se = std::sqrt(2.0) * 20.0 * std::sqrt(0.05 * 0.95 / 1000.0);
  for (const double rb : report.rb_per_bin) EXPECT_NEAR(rb, 1.0, 3.0 * se);
}

TEST(RunTest, MedianRatioGrowsWithSampleSizeOnNullData) {
  TestConfig config;  // a = 5, N = 500, r1 = r2 = 1000, M = 20
  double previous = 0.0;
  for (const std::size_t n : {50u, 200u, 800u}) {
    std::vector<double> rbs;
    for (std::size_t rep = 0; rep < 20; ++rep) {
      RngStream data_rng(1000 + rep, n);
      const auto data = bnpnorm::generate(bnpnorm::named_spec("normal_A", 2, n), data_rng);
      config.seed = rep;
      rbs.push_back(bnpnorm::run_test(data, config).rb_at_zero);
    }
    std::sort(rbs.begin(), rbs.end());
    const double median = 0.5 * (rbs[9] + rbs[10]);
    EXPECT_GE(median, previous) << "n=" << n;
    previous = median;
  }
}

TEST(RunTest, OverwhelmingPriorPullsPosteriorTowardBase) {
  // Cauchy marginals: with a = 10 n the chi-square base dominates the
  // posterior base measure, so posterior distances move toward the prior
  // ones and the ratio at zero cannot fall.
  RngStream data_rng(1100, 0);
  const auto data = bnpnorm::generate(bnpnorm::named_spec("pvii_1", 2, 50), data_rng);
  const auto d = bnpnorm::squared_mahalanobis(data);
  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  TestConfig config;
  config.seed = 3;
  config.N = 2000;
  std::vector<double> gap;
  std::vector<double> rb;
  for (const double a : {5.0, 500.0}) {
    config.a = a;
    const auto report = bnpnorm::run_test_on_distances(d, DegreesOfFreedom(2), config);
    gap.push_back(median(report.posterior_distances.values) /
                  median(report.prior_distances.values));
    rb.push_back(report.rb_at_zero);
  }
  EXPECT_LT(gap[1], gap[0]);
  EXPECT_GE(rb[1], rb[0]);
}

}  // namespace
