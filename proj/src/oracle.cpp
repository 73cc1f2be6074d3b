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

#include "skein/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skein {

void softmax_scores_row(const AttentionInput& input, std::size_t i, std::span<double> out) {
  const std::size_t m = input.m();
  std::ranges::fill(out, 0.0);
  double row_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    out[j] = input.logit(i, j);
    row_max = std::max(row_max, out[j]);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    out[j] = std::exp(out[j] - row_max);
    sum += out[j];
  }
  const double inv = 1.0 / sum;
  for (std::size_t j = 0; j < m; ++j) out[j] *= inv;
}

namespace {

void accumulate_output_row(const AttentionInput& input, std::span<const double> scores,
                           std::span<double> dst) {
  const auto& v = input.v();
  for (std::size_t j = 0; j < input.m(); ++j) {
    const double w = scores[j];
    auto vj = v.row(j);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * vj[c];
  }
}

}  // namespace

DenseMatrix exact_attention(const AttentionInput& input) {
  DenseMatrix out(input.n(), input.p());
  std::vector<double> scores(input.n());
  for (std::size_t i = 0; i < input.m(); ++i) {
    softmax_scores_row(input, i, scores);
    accumulate_output_row(input, scores, out.row(i));
  }
  return out;
}

DenseMatrix exact_attention_rows(const AttentionInput& input, std::span<const std::size_t> rows) {
  DenseMatrix out(rows.size(), input.p());
  std::vector<double> scores(input.n());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= input.m()) throw InvalidArgument("exact_attention_rows: index in padded range");
    softmax_scores_row(input, rows[r], scores);
    accumulate_output_row(input, scores, out.row(r));
  }
  return out;
}

ScoreMatrices score_matrices(const AttentionInput& input, std::size_t cap) {
  const std::size_t n = input.n();
  if (n > cap) {
    throw ResourceLimit("score_matrices: n = " + std::to_string(n) + " exceeds oracle cap " +
                        std::to_string(cap) + "; use an approximation");
  }
  ScoreMatrices s{DenseMatrix(n, n), std::vector<double>(n, 0.0), DenseMatrix(n, n)};
  for (std::size_t i = 0; i < input.m(); ++i) {
    auto a = s.A.row(i);
    for (std::size_t j = 0; j < input.m(); ++j) {
      a[j] = std::exp(input.logit(i, j));
      s.row_sums[i] += a[j];
    }
    softmax_scores_row(input, i, s.B.row(i));
  }
  return s;
}

}  // namespace skein
