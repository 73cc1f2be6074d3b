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
#include <span>
#include <vector>

#include "skein/core.hpp"
#include "skein/oracle.hpp"

namespace skein {

/// Every unpadded row is the mean of the unpadded rows of V.
DenseMatrix vmean_attention(const AttentionInput& input);

/// softmax((QK^T / sqrt(p)) S) (S^T V) with a Gaussian m x d sketch over the
/// unpadded keys. Costs O(n d p).
DenseMatrix linformer_attention(const AttentionInput& input, std::size_t d, RngSeed seed);
/// Same with a caller-supplied m x d sketch.
DenseMatrix linformer_attention(const AttentionInput& input, const DenseMatrix& sketch);

/// B S (S^T V) with the exact score matrix B. Needs n <= cap.
DenseMatrix linformer_unreduced(const AttentionInput& input, std::size_t d, RngSeed seed,
                                std::size_t cap = kDefaultOracleCap);
DenseMatrix linformer_unreduced(const AttentionInput& input, const DenseMatrix& sketch,
                                std::size_t cap = kDefaultOracleCap);

/// ln(arithmetic mean) - ln(geometric mean) of a positive score row.
double informer_sparsity(std::span<const double> scores);
/// The same measurement from logits, ln(a_ij); stable for any logit range.
double informer_sparsity_from_logits(std::span<const double> logits);

struct InformerSelection {
  std::vector<std::size_t> pilot_columns;  // uniform with replacement over [0, m)
  std::vector<double> sparsity;            // estimated M_i for i < m
  std::vector<std::size_t> selected_rows;  // top-d by sparsity, ties to the lower index
};

InformerSelection informer_select(const AttentionInput& input, std::size_t d, RngSeed seed);

/// Selected rows computed exactly, all other unpadded rows set to the mean of
/// V. `score_entries` (optional) receives the number of computed logits.
DenseMatrix informer_attention(const AttentionInput& input, std::size_t d, RngSeed seed,
                               std::uint64_t* score_entries = nullptr);

}  // namespace skein
