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

// Univariate laws shared by the base measures and the data generators.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "bnpnorm/errors.hpp"
#include "bnpnorm/rng.hpp"
#include "bnpnorm/specialfn.hpp"

namespace bnpnorm {

struct NormalLaw {
  double mean = 0.0;
  double sd = 1.0;
};

struct ExponentialLaw {
  double rate = 1.0;
};

struct CauchyLaw {
  double location = 0.0;
  double scale = 1.0;
};

// Location-scale Student t.
struct StudentTLaw {
  double df = 1.0;
  double location = 0.0;
  double scale = 1.0;
};

struct ChiSquareLaw {
  double df = 1.0;
};

// exp(N(meanlog, sdlog^2)).
struct LogNormalLaw {
  double meanlog = 0.0;
  double sdlog = 1.0;
};

using UnivariateLaw = std::variant<NormalLaw, ExponentialLaw, CauchyLaw,
                                   StudentTLaw, ChiSquareLaw, LogNormalLaw>;

namespace detail {
inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidSpec(std::string(what) + " must be finite and > 0");
  }
}

// chi-square with real degrees of freedom, by inversion.
inline double draw_chi_square(double df, RngStream& rng) {
  return 2.0 * gamma_quantile(0.5 * df, rng.uniform());
}
}  // namespace detail

inline void validate(const UnivariateLaw& law) {
  std::visit(
      [](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, NormalLaw>) {
          detail::require_positive(l.sd, "normal sd");
        } else if constexpr (std::is_same_v<T, ExponentialLaw>) {
          detail::require_positive(l.rate, "exponential rate");
        } else if constexpr (std::is_same_v<T, CauchyLaw>) {
          detail::require_positive(l.scale, "cauchy scale");
        } else if constexpr (std::is_same_v<T, StudentTLaw>) {
          detail::require_positive(l.df, "t degrees of freedom");
          detail::require_positive(l.scale, "t scale");
        } else if constexpr (std::is_same_v<T, ChiSquareLaw>) {
          detail::require_positive(l.df, "chi-square degrees of freedom");
        } else {
          detail::require_positive(l.sdlog, "lognormal sdlog");
        }
      },
      law);
}

inline double draw(const UnivariateLaw& law, RngStream& rng) {
  return std::visit(
      [&rng](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, NormalLaw>) {
          return l.mean + l.sd * rng.normal();
        } else if constexpr (std::is_same_v<T, ExponentialLaw>) {
          return rng.exponential() / l.rate;
        } else if constexpr (std::is_same_v<T, CauchyLaw>) {
          return l.location +
                 l.scale * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
        } else if constexpr (std::is_same_v<T, StudentTLaw>) {
          const double z = rng.normal();
          const double v = detail::draw_chi_square(l.df, rng);
          return l.location + l.scale * z / std::sqrt(v / l.df);
        } else if constexpr (std::is_same_v<T, ChiSquareLaw>) {
          return detail::draw_chi_square(l.df, rng);
        } else {
          return std::exp(l.meanlog + l.sdlog * rng.normal());
        }
      },
      law);
}

[[nodiscard]] inline std::string describe(const UnivariateLaw& law) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        auto num = [](double v) {
          std::string s = std::to_string(v);
          s.erase(s.find_last_not_of('0') + 1);
          if (!s.empty() && s.back() == '.') s.pop_back();
          return s;
        };
        if constexpr (std::is_same_v<T, NormalLaw>) {
          return "N(" + num(l.mean) + "," + num(l.sd * l.sd) + ")";
        } else if constexpr (std::is_same_v<T, ExponentialLaw>) {
          return "E(" + num(l.rate) + ")";
        } else if constexpr (std::is_same_v<T, CauchyLaw>) {
          return "C(" + num(l.location) + "," + num(l.scale) + ")";
        } else if constexpr (std::is_same_v<T, StudentTLaw>) {
          return "t" + num(l.df) + "(" + num(l.location) + "," + num(l.scale) + ")";
        } else if constexpr (std::is_same_v<T, ChiSquareLaw>) {
          return "chi2(" + num(l.df) + ")";
        } else {
          return "LN(" + num(l.meanlog) + "," + num(l.sdlog) + ")";
        }
      },
      law);
}

}  // namespace bnpnorm
