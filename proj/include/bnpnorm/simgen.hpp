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

// Generators for the null and alternative laws of the simulation study.

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bnpnorm/errors.hpp"
#include "bnpnorm/laws.hpp"
#include "bnpnorm/mahalanobis.hpp"
#include "bnpnorm/rng.hpp"

namespace bnpnorm {

struct MvNormal {
  Vector mean;
  Matrix cov;
};

// location + scale^{1/2} z / sqrt(chi2(df) / df)
struct MvT {
  double df;
  Vector location;
  Matrix scale;
};

// exp of N(mean, cov); the parameters belong to the underlying normal.
struct MvLogNormal {
  Vector mean;
  Matrix cov;
};

// Uniform direction on the unit sphere times a radius ||Y|| drawn from
// `radius`.
struct Spherical {
  UnivariateLaw radius;
};

// m iid Pearson type VII(location 1, scale 1, df) coordinates, i.e. 1 + t(df).
struct PearsonVIIiid {
  double df;
};

struct ProductMarginals {
  std::vector<UnivariateLaw> marginals;
};

// weight N(mean1, cov1) + (1 - weight) N(mean2, cov2)
struct NormalMixture {
  double weight;
  Vector mean1;
  Matrix cov1;
  Vector mean2;
  Matrix cov2;
};

using Family = std::variant<MvNormal, MvT, MvLogNormal, Spherical,
                            PearsonVIIiid, ProductMarginals, NormalMixture>;

struct AlternativeSpec {
  Family family;
  std::size_t m = 2;
  std::size_t n = 50;
};

// c on the diagonal, r elsewhere.
[[nodiscard]] inline Matrix equicorrelated(std::size_t m, double diagonal,
                                           double off_diagonal) {
  const auto k = static_cast<Eigen::Index>(m);
  Matrix out = Matrix::Constant(k, k, off_diagonal);
  out.diagonal().setConstant(diagonal);
  return out;
}

namespace detail {

inline Matrix cholesky_factor(const Matrix& cov, std::size_t m, const char* what) {
  const auto k = static_cast<Eigen::Index>(m);
  if (cov.rows() != k || cov.cols() != k) {
    throw InvalidSpec(std::string(what) + " must be " + std::to_string(m) + "x" +
                      std::to_string(m));
  }
  if (!cov.allFinite() || !cov.isApprox(cov.transpose(), 1e-12)) {
    throw InvalidSpec(std::string(what) + " must be finite and symmetric");
  }
  const Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidSpec(std::string(what) + " is not positive definite");
  }
  return llt.matrixL();
}

inline void check_vector(const Vector& v, std::size_t m, const char* what) {
  if (v.size() != static_cast<Eigen::Index>(m) || !v.allFinite()) {
    throw InvalidSpec(std::string(what) + " must be a finite vector of length " +
                      std::to_string(m));
  }
}

inline Vector standard_normal(std::size_t m, RngStream& rng) {
  Vector z(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
  return z;
}

inline void require_positive_df(double df) {
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw InvalidSpec("degrees of freedom must be finite and > 0");
  }
}

}  // namespace detail

// Throws InvalidSpec unless every matrix is SPD and every size matches m.
inline void validate(const AlternativeSpec& spec) {
  if (spec.m < 1) throw InvalidSpec("dimension m must be >= 1");
  if (spec.n < 2) throw InvalidSpec("sample size n must be >= 2");
  const std::size_t m = spec.m;
  std::visit(
      [m](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, MvNormal> || std::is_same_v<T, MvLogNormal>) {
          detail::check_vector(f.mean, m, "mean");
          (void)detail::cholesky_factor(f.cov, m, "covariance");
        } else if constexpr (std::is_same_v<T, MvT>) {
          detail::require_positive_df(f.df);
          detail::check_vector(f.location, m, "location");
          (void)detail::cholesky_factor(f.scale, m, "scale matrix");
        } else if constexpr (std::is_same_v<T, Spherical>) {
          validate(f.radius);
        } else if constexpr (std::is_same_v<T, PearsonVIIiid>) {
          detail::require_positive_df(f.df);
        } else if constexpr (std::is_same_v<T, ProductMarginals>) {
          if (f.marginals.size() != m) {
            throw InvalidSpec("product law needs exactly m marginals");
          }
          for (const auto& law : f.marginals) validate(law);
        } else {
          if (!(f.weight > 0.0 && f.weight < 1.0)) {
            throw InvalidSpec("mixture weight must lie in (0, 1)");
          }
          detail::check_vector(f.mean1, m, "mixture mean 1");
          detail::check_vector(f.mean2, m, "mixture mean 2");
          (void)detail::cholesky_factor(f.cov1, m, "mixture covariance 1");
          (void)detail::cholesky_factor(f.cov2, m, "mixture covariance 2");
        }
      },
      spec.family);
}

// n x m sample of iid rows from the specified law.
[[nodiscard]] inline DataMatrix generate(const AlternativeSpec& spec, RngStream& rng) {
  validate(spec);
  const std::size_t m = spec.m;
  const auto rows = static_cast<Eigen::Index>(spec.n);
  Matrix out(rows, static_cast<Eigen::Index>(m));

  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, MvNormal> || std::is_same_v<T, MvLogNormal>) {
          const Matrix L = detail::cholesky_factor(f.cov, m, "covariance");
          for (Eigen::Index i = 0; i < rows; ++i) {
            Vector y = f.mean + L * detail::standard_normal(m, rng);
            if constexpr (std::is_same_v<T, MvLogNormal>) y = y.array().exp();
            out.row(i) = y.transpose();
          }
        } else if constexpr (std::is_same_v<T, MvT>) {
          const Matrix L = detail::cholesky_factor(f.scale, m, "scale matrix");
          for (Eigen::Index i = 0; i < rows; ++i) {
            const Vector z = L * detail::standard_normal(m, rng);
            const double v = detail::draw_chi_square(f.df, rng);
            out.row(i) = (f.location + z / std::sqrt(v / f.df)).transpose();
          }
        } else if constexpr (std::is_same_v<T, Spherical>) {
          for (Eigen::Index i = 0; i < rows; ++i) {
            Vector z = detail::standard_normal(m, rng);
            const double r = draw(f.radius, rng);
            out.row(i) = (r / z.norm() * z).transpose();
          }
        } else if constexpr (std::is_same_v<T, PearsonVIIiid>) {
          const UnivariateLaw law = StudentTLaw{f.df, 1.0, 1.0};
          for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = draw(law, rng);
          }
        } else if constexpr (std::is_same_v<T, ProductMarginals>) {
          for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) {
              out(i, j) = draw(f.marginals[static_cast<std::size_t>(j)], rng);
            }
          }
        } else {
          const Matrix L1 = detail::cholesky_factor(f.cov1, m, "mixture covariance 1");
          const Matrix L2 = detail::cholesky_factor(f.cov2, m, "mixture covariance 2");
          for (Eigen::Index i = 0; i < rows; ++i) {
            const bool first = rng.uniform() < f.weight;
            const Vector z = detail::standard_normal(m, rng);
            out.row(i) = (first ? Vector(f.mean1 + L1 * z) : Vector(f.mean2 + L2 * z))
                             .transpose();
          }
        }
      },
      spec.family);
  return DataMatrix(std::move(out));
}

// Named laws of the simulation study, for dimension m:
//   normal_A             N_m(0, A_m), A_m = 1 on the diagonal, 0.1 elsewhere
//   normal_I             N_m(0, I_m)
//   exp_cauchy           E(1/2) x C(0,1)^(m-1)
//   normal_t1            N(0,1) x t_1^(m-1)
//   pvii_1, pvii_10      (P_VII(1,1,r))^m
//   spherical_lognormal  S^m(LN(0, 0.25))
//   spherical_chi2       S^m(chi2_5)
//   lognormal_B          LN_m(0, B_m), B_m = 0.25 on the diagonal, 0.2 elsewhere
//   t3                   t_3(0, I_m)
//   nmix                 0.9 N_m(5, A_m) + 0.1 N_m(-5, A_m)
[[nodiscard]] inline const std::vector<std::string>& named_families() {
  static const std::vector<std::string> names = {
      "normal_A",      "normal_I",   "exp_cauchy",          "normal_t1",
      "pvii_1",        "pvii_10",    "spherical_lognormal", "spherical_chi2",
      "lognormal_B",   "t3",         "nmix"};
  return names;
}

[[nodiscard]] inline Family named_family(std::string_view name, std::size_t m) {
  if (m < 1) throw InvalidSpec("dimension m must be >= 1");
  const auto k = static_cast<Eigen::Index>(m);
  const Vector zero = Vector::Zero(k);
  const Matrix A = equicorrelated(m, 1.0, 0.1);
  const Matrix I = Matrix::Identity(k, k);
  const auto repeat = [m](UnivariateLaw first, UnivariateLaw rest) {
    ProductMarginals p;
    p.marginals.push_back(std::move(first));
    for (std::size_t j = 1; j < m; ++j) p.marginals.push_back(rest);
    return p;
  };
  if (name == "normal_A") return MvNormal{zero, A};
  if (name == "normal_I") return MvNormal{zero, I};
  if (name == "exp_cauchy") return repeat(ExponentialLaw{0.5}, CauchyLaw{0.0, 1.0});
  if (name == "normal_t1") {
    return repeat(NormalLaw{0.0, 1.0}, StudentTLaw{1.0, 0.0, 1.0});
  }
  if (name == "pvii_1") return PearsonVIIiid{1.0};
  if (name == "pvii_10") return PearsonVIIiid{10.0};
  if (name == "spherical_lognormal") return Spherical{LogNormalLaw{0.0, 0.25}};
  if (name == "spherical_chi2") return Spherical{ChiSquareLaw{5.0}};
  if (name == "lognormal_B") return MvLogNormal{zero, equicorrelated(m, 0.25, 0.2)};
  if (name == "t3") return MvT{3.0, zero, I};
  if (name == "nmix") {
    return NormalMixture{0.9, Vector::Constant(k, 5.0), A, Vector::Constant(k, -5.0), A};
  }
  throw InvalidSpec("unknown family '" + std::string(name) + "'");
}

[[nodiscard]] inline AlternativeSpec named_spec(std::string_view name, std::size_t m,
                                                std::size_t n) {
  return AlternativeSpec{named_family(name, m), m, n};
}

// Caveats a report should carry for this family.
[[nodiscard]] inline std::vector<std::string> family_notes(const Family& family) {
  std::vector<std::string> notes;
  if (std::holds_alternative<MvLogNormal>(family)) {
    notes.emplace_back(
        "lognormal mean and covariance are parameters of the underlying normal");
  }
  return notes;
}

}  // namespace bnpnorm
