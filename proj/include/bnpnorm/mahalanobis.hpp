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

// Reduction of an m-variate sample to squared sample Mahalanobis distances
// (y_i - ybar)' S^{-1} (y_i - ybar), with S the unbiased sample covariance.

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bnpnorm/errors.hpp"

namespace bnpnorm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// n observations (rows) of m variables (columns); n >= 2, m >= 1, finite.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2) {
      throw InvalidData("need at least 2 observations, got " +
                        std::to_string(values_.rows()));
    }
    if (values_.cols() < 1) throw InvalidData("need at least 1 variable");
    if (!values_.allFinite()) throw InvalidData("data contains non-finite values");
  }

  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidData("no observations");
    const std::size_t m = rows.front().size();
    Matrix values(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m) {
        throw InvalidData("row " + std::to_string(i) + " has " +
                          std::to_string(rows[i].size()) + " values, expected " +
                          std::to_string(m));
      }
      for (std::size_t j = 0; j < m; ++j) {
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            rows[i][j];
      }
    }
    return DataMatrix(std::move(values));
  }

  [[nodiscard]] std::size_t n() const noexcept {
    return static_cast<std::size_t>(values_.rows());
  }
  [[nodiscard]] std::size_t m() const noexcept {
    return static_cast<std::size_t>(values_.cols());
  }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

struct SquaredDistances {
  std::vector<double> values;
  // Ratio of the largest to the smallest Cholesky pivot of the correlation
  // matrix; above kIllConditionedRatio the distances are numerically fragile.
  double pivot_ratio = 1.0;
  bool ill_conditioned = false;

  static constexpr double kIllConditionedRatio = 1e12;
};

[[nodiscard]] inline Vector sample_mean(const DataMatrix& data) {
  return data.values().colwise().mean().transpose();
}

// Unbiased (n - 1 divisor) two-pass covariance.
[[nodiscard]] inline Matrix sample_covariance(const DataMatrix& data) {
  const Matrix centered =
      data.values().rowwise() - sample_mean(data).transpose();
  Matrix cov = (centered.transpose() * centered) /
               static_cast<double>(data.n() - 1);
  // exact symmetry regardless of GEMM summation order
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov;
}

// Squared sample Mahalanobis distances via a Cholesky solve of the
// correlation-scaled covariance; no explicit inverse is formed.
[[nodiscard]] inline SquaredDistances squared_mahalanobis(const DataMatrix& data) {
  const std::size_t n = data.n();
  const std::size_t m = data.m();
  if (n <= m) {
    throw SingularCovariance("sample covariance is singular: n = " +
                             std::to_string(n) + " <= m = " + std::to_string(m));
  }
  const Vector mean = sample_mean(data);
  const Matrix centered = data.values().rowwise() - mean.transpose();
  const Matrix cov = sample_covariance(data);

  Vector inv_sd(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < cov.rows(); ++j) {
    if (!(cov(j, j) > 0.0)) {
      throw SingularCovariance("variable " + std::to_string(j) +
                               " has zero sample variance");
    }
    inv_sd(j) = 1.0 / std::sqrt(cov(j, j));
  }
  const Matrix corr = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  const Eigen::LLT<Matrix> llt(corr);
  if (llt.info() != Eigen::Success) {
    throw SingularCovariance("sample covariance is not positive definite");
  }
  const Vector pivots = llt.matrixL().toDenseMatrix().diagonal().array().square();
  const double min_pivot = pivots.minCoeff();
  const double max_pivot = pivots.maxCoeff();
  if (!(min_pivot > 64.0 * static_cast<double>(m) *
                        Eigen::NumTraits<double>::epsilon() * max_pivot)) {
    throw SingularCovariance("sample covariance is numerically singular "
                             "(collinear variables)");
  }

  // Z = L^{-1} D^{-1/2} (y_i - ybar), one column per observation.
  Matrix z = inv_sd.asDiagonal() * centered.transpose();
  llt.matrixL().solveInPlace(z);

  SquaredDistances out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = z.col(static_cast<Eigen::Index>(i)).squaredNorm();
  }
  out.pivot_ratio = max_pivot / min_pivot;
  out.ill_conditioned = out.pivot_ratio > SquaredDistances::kIllConditionedRatio;
  return out;
}

}  // namespace bnpnorm
