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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace skein {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed MATF payload. `offset()` is the byte position where decoding
/// stopped making sense.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when an O(n^2) operation is asked to exceed its configured cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// DenseMatrix
// ---------------------------------------------------------------------------

/// Row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;
  bool same_shape(const DenseMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
/// Rows [0, count) of `a`.
DenseMatrix top_rows(const DenseMatrix& a, std::size_t count);
double frobenius_norm(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

/// 64-bit avalanche mix. For fixed `master`, the map t -> mix_seed(master, t)
/// is a bijection on 64-bit integers.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) noexcept;

struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Seed for the t-th independent trial of an experiment driven by this seed.
  RngSeed derive(std::uint64_t t) const noexcept {
    return RngSeed{mix_seed(master_seed, stream_id), t};
  }
  std::uint64_t value() const noexcept { return mix_seed(master_seed, stream_id); }

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Platform-stable random stream. Only the raw 64-bit engine output of
/// mt19937_64 is used; all distributions are implemented here so results do
/// not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value()) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_positive();
  /// Uniform integer on [0, bound). `bound` must be positive.
  std::size_t uniform_index(std::size_t bound);
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

DenseMatrix generate_gaussian_matrix(std::size_t rows, std::size_t cols, double stdev, RngSeed seed);

// ---------------------------------------------------------------------------
// AttentionInput
// ---------------------------------------------------------------------------

/// Validated (Q, K, V) triple. Rows with index >= unpadded_len are padding;
/// construction zeroes the padding rows of K and V.
class AttentionInput {
 public:
  AttentionInput(DenseMatrix q, DenseMatrix k, DenseMatrix v,
                 std::optional<std::size_t> unpadded_len = std::nullopt);

  const DenseMatrix& q() const noexcept { return q_; }
  const DenseMatrix& k() const noexcept { return k_; }
  const DenseMatrix& v() const noexcept { return v_; }

  std::size_t n() const noexcept { return q_.rows(); }
  std::size_t p() const noexcept { return q_.cols(); }
  std::size_t m() const noexcept { return m_; }
  bool padded() const noexcept { return m_ < n(); }
  /// 1/sqrt(p), the logit scale.
  double scale() const noexcept { return scale_; }

  /// Scaled logit q_i . k_j / sqrt(p).
  double logit(std::size_t i, std::size_t j) const;

 private:
  DenseMatrix q_, k_, v_;
  std::size_t m_;
  double scale_;
};

/// Q, K, V drawn i.i.d. N(0, stdev^2) from three streams derived from `seed`.
AttentionInput gaussian_attention_input(std::size_t n, std::size_t p, double stdev, RngSeed seed);

/// Copy of `input` with `extra` all-zero rows appended to Q, K and V; the
/// unpadded length is unchanged.
AttentionInput append_padding(const AttentionInput& input, std::size_t extra);

}  // namespace skein
