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

#include "skein/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace skein {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidArgument("DenseMatrix: data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidArgument("DenseMatrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("multiply: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto src = b.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw InvalidArgument("subtract: shape mismatch");
  DenseMatrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  return out;
}

DenseMatrix top_rows(const DenseMatrix& a, std::size_t count) {
  count = std::min(count, a.rows());
  auto src = a.data();
  return DenseMatrix(count, a.cols(),
                     std::vector<double>(src.begin(), src.begin() + count * a.cols()));
}

double frobenius_norm(const DenseMatrix& a) {
  double sum = 0.0;
  for (double x : a.data()) sum += x * x;
  return std::sqrt(sum);
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw InvalidArgument("max_abs_diff: shape mismatch");
  double worst = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return finalize(finalize(master) + kGolden * (stream + 1));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_positive() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_index: empty range");
  const std::uint64_t b = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % b;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % b);
}

double Rng::normal() {
  if (spare_normal_) {
    const double out = *spare_normal_;
    spare_normal_.reset();
    return out;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  return u * factor;
}

DenseMatrix generate_gaussian_matrix(std::size_t rows, std::size_t cols, double stdev, RngSeed seed) {
  if (rows == 0 || cols == 0) throw InvalidArgument("generate_gaussian_matrix: zero dimension");
  if (!(stdev > 0.0) || !std::isfinite(stdev)) {
    throw InvalidArgument("generate_gaussian_matrix: stdev must be positive and finite");
  }
  Rng rng(seed);
  DenseMatrix out(rows, cols);
  for (double& x : out.data()) x = stdev * rng.normal();
  return out;
}

AttentionInput::AttentionInput(DenseMatrix q, DenseMatrix k, DenseMatrix v,
                               std::optional<std::size_t> unpadded_len)
    : q_(std::move(q)), k_(std::move(k)), v_(std::move(v)) {
  if (!q_.same_shape(k_) || !q_.same_shape(v_)) {
    throw InvalidArgument("AttentionInput: Q, K, V must share one n x p shape");
  }
  if (q_.rows() == 0 || q_.cols() == 0) throw InvalidArgument("AttentionInput: empty matrices");
  if (!q_.all_finite() || !k_.all_finite() || !v_.all_finite()) {
    throw InvalidArgument("AttentionInput: non-finite entry");
  }
  m_ = unpadded_len.value_or(q_.rows());
  if (m_ < 1 || m_ > q_.rows()) {
    throw InvalidArgument("AttentionInput: unpadded length must lie in [1, n]");
  }
  for (std::size_t i = m_; i < q_.rows(); ++i) {
    std::ranges::fill(k_.row(i), 0.0);
    std::ranges::fill(v_.row(i), 0.0);
  }
  scale_ = 1.0 / std::sqrt(static_cast<double>(q_.cols()));
}

double AttentionInput::logit(std::size_t i, std::size_t j) const {
  auto qi = q_.row(i);
  auto kj = k_.row(j);
  double dot = 0.0;
  for (std::size_t c = 0; c < qi.size(); ++c) dot += qi[c] * kj[c];
  return dot * scale_;
}

AttentionInput gaussian_attention_input(std::size_t n, std::size_t p, double stdev, RngSeed seed) {
  return AttentionInput(generate_gaussian_matrix(n, p, stdev, seed.derive(0)),
                        generate_gaussian_matrix(n, p, stdev, seed.derive(1)),
                        generate_gaussian_matrix(n, p, stdev, seed.derive(2)));
}

AttentionInput append_padding(const AttentionInput& input, std::size_t extra) {
  auto grow = [&](const DenseMatrix& src) {
    DenseMatrix out(src.rows() + extra, src.cols());
    std::ranges::copy(src.data(), out.data().begin());
    return out;
  };
  return AttentionInput(grow(input.q()), grow(input.k()), grow(input.v()), input.m());
}

}  // namespace skein
