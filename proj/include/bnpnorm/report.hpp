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

// Machine-readable test report.

#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "bnpnorm/laws.hpp"
#include "bnpnorm/rbtest.hpp"

namespace bnpnorm {

inline constexpr int kReportSchemaVersion = 1;

enum class Verdict { favor_H0, against_H0, no_evidence };

// Sign of rb - 1; an exact tie is no evidence either way.
[[nodiscard]] constexpr Verdict verdict_of(double rb) noexcept {
  if (rb > 1.0) return Verdict::favor_H0;
  if (rb < 1.0) return Verdict::against_H0;
  return Verdict::no_evidence;
}

[[nodiscard]] constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::favor_H0:
      return "favor_H0";
    case Verdict::against_H0:
      return "against_H0";
    case Verdict::no_evidence:
      break;
  }
  return "no_evidence";
}

// Reading of the strength in the direction of the verdict. For evidence in
// favor a large strength is strong; for evidence against a small one is.
[[nodiscard]] inline std::string strength_interpretation(double rb, double strength) {
  switch (verdict_of(rb)) {
    case Verdict::favor_H0:
      return strength >= 0.5 ? "strong evidence in favor of normality"
                             : "weak evidence in favor of normality";
    case Verdict::against_H0:
      return strength < 0.5 ? "strong evidence against normality"
                            : "weak evidence against normality";
    case Verdict::no_evidence:
      break;
  }
  return "no evidence either way";
}

[[nodiscard]] inline nlohmann::ordered_json config_json(const TestConfig& config,
                                                        std::size_t m) {
  nlohmann::ordered_json c;
  c["a"] = config.a;
  c["N"] = config.N;
  c["r1"] = config.r1;
  c["r2"] = config.r2;
  c["M"] = config.M;
  c["i0"] = config.i0;
  c["seed"] = config.seed;
  c["base"] = config.base ? describe(*config.base)
                          : "chi2(" + std::to_string(m) + ")";
  return c;
}

// Thread count, paths and times are left out so the bytes depend only on
// data and configuration.
[[nodiscard]] inline nlohmann::ordered_json report_json(
    const RBReport& report, const TestConfig& config,
    const std::vector<std::string>& extra_warnings = {}) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["n"] = report.diagnostics.n;
  j["m"] = report.diagnostics.m;
  j["config"] = config_json(config, report.diagnostics.m);
  j["rb_at_zero"] = report.rb_at_zero;
  j["strength"] = report.strength;
  j["verdict"] = to_string(verdict_of(report.rb_at_zero));
  j["strength_interpretation"] =
      strength_interpretation(report.rb_at_zero, report.strength);
  j["rb_per_bin"] = report.rb_per_bin;
  j["quantile_grid"] = report.quantile_grid;
  std::vector<std::string> warnings = report.diagnostics.warnings;
  warnings.insert(warnings.end(), extra_warnings.begin(), extra_warnings.end());
  j["warnings"] = warnings;
  return j;
}

}  // namespace bnpnorm
