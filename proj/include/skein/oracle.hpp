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
#include <span>
#include <vector>

#include "skein/core.hpp"

namespace skein {

inline constexpr std::size_t kDefaultOracleCap = 8192;

/// Explicit score matrices of one attention head.
///
/// `A` holds exp(QK^T / sqrt(p)) without stabilization, so it may contain
/// +inf when logits exceed ~709; `B` is always computed in stabilized form.
/// Padded rows and columns are zero in all three members.
struct ScoreMatrices {
  DenseMatrix A;
  std::vector<double> row_sums;
  DenseMatrix B;
};

/// softmax(QK^T / sqrt(p)) V with the padded keys masked out. Uses O(n)
/// scratch, so it runs at any n. Rows >= m of the result are zero.
DenseMatrix exact_attention(const AttentionInput& input);

/// Exact output rows for the listed query indices (each < m), in order.
DenseMatrix exact_attention_rows(const AttentionInput& input, std::span<const std::size_t> rows);

/// Writes the normalized score row i (length n, padded columns zero).
void softmax_scores_row(const AttentionInput& input, std::size_t i, std::span<double> out);

/// Throws ResourceLimit when n > cap.
ScoreMatrices score_matrices(const AttentionInput& input, std::size_t cap = kDefaultOracleCap);

}  // namespace skein
