// Copyright 2026 The Skein Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library's numerical code.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "skein/core.hpp"

namespace skein::test {

// Unstabilized double loop: exp of raw logits, then normalize.
inline DenseMatrix naive_attention(const DenseMatrix& q, const DenseMatrix& k, const DenseMatrix& v,
                                   std::size_t m) {
  const std::size_t n = q.rows();
  const std::size_t p = q.cols();
  DenseMatrix out(n, v.cols());
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> w(m);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < p; ++c) dot += q(i, c) * k(j, c);
      w[j] = std::exp(dot / std::sqrt(static_cast<double>(p)));
      total += w[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t c = 0; c < v.cols(); ++c) out(i, c) += w[j] / total * v(j, c);
    }
  }
  return out;
}

inline DenseMatrix naive_attention(const DenseMatrix& q, const DenseMatrix& k, const DenseMatrix& v) {
  return naive_attention(q, k, v, q.rows());
}

// Full normalized score matrix by the same unstabilized loop.
inline DenseMatrix naive_scores(const DenseMatrix& q, const DenseMatrix& k, std::size_t m) {
  const std::size_t n = q.rows();
  DenseMatrix b(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < q.cols(); ++c) dot += q(i, c) * k(j, c);
      b(i, j) = std::exp(dot / std::sqrt(static_cast<double>(q.cols())));
      total += b(i, j);
    }
    for (std::size_t j = 0; j < m; ++j) b(i, j) /= total;
  }
  return b;
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  }
  return e;
}

// Largest singular value from a two-sided Jacobi SVD.
inline double svd_spectral_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  return svd.singularValues()(0);
}

inline DenseMatrix naive_product(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

// Test-local generator so fixtures do not depend on the library's RNG.
inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen, double stdev = 1.0) {
  std::normal_distribution<double> dist(0.0, stdev);
  DenseMatrix out(rows, cols);
  for (double& x : out.data()) x = dist(gen);
  return out;
}

inline double max_abs(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

}  // namespace skein::test
