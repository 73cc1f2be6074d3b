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
#include "skein/sketch.hpp"

namespace skein {

enum class SamplingMode { importance, uniform };
enum class RowNormMode { adaptive, simple, off };

struct SkeinConfig {
  std::size_t d = 32;
  SamplingMode sampling = SamplingMode::importance;
  RowNormMode row_norm = RowNormMode::adaptive;
  bool reuse_pilot = true;
  RngSeed seed;
};

/// Intermediates of one Skeinformer call.
///
/// Column scores are stored stabilized: `column_scores(i, k)` equals
/// exp(logit(i, columns[k]) - row_shift[i]), and `geo_mean` and `row_sums`
/// carry the same per-row factor exp(-row_shift[i]). Rows >= m are zero.
struct SkeinTrace {
  std::vector<std::size_t> pilot_rows;     // J, uniform with replacement over [0, m)
  DenseMatrix pilot_scores;                // B_J, d x n
  std::vector<double> p_hat;               // estimated column probabilities, length n
  bool p_hat_degenerate = false;
  std::vector<std::size_t> columns;        // J', distinct
  DenseMatrix column_scores;               // A^{J'}, n x d'
  std::vector<double> row_shift;           // per-row max selected logit
  std::vector<double> geo_mean;            // g
  std::vector<double> row_sums;            // estimated diagonal of D
  std::vector<double> unselected_value_sum;  // v, length p
  DenseMatrix output;                      // R
  bool exact_fallback = false;             // d >= m, output is exact attention
  std::uint64_t score_entries = 0;         // computed entries of QK^T
};

/// Uniform draws with replacement from [0, m). Throws on m == 0.
std::vector<std::size_t> pilot_sample(std::size_t m, std::size_t d, Rng& rng);

/// Rows of the normalized score matrix for the given query indices.
DenseMatrix pilot_scores(const AttentionInput& input, std::span<const std::size_t> rows);

/// p_hat_i proportional to sqrt(sum_k b_{j_k i}^2) * ||V_(i)|| over i < m.
ProbabilityVector estimate_probs(const DenseMatrix& pilot, const DenseMatrix& v, std::size_t m);

/// Multiplicity of each row in a uniform with-replacement pilot of size d over
/// [0, m), drawn directly as Multinomial(d; 1/m, ..., 1/m) in O(m).
std::vector<std::uint64_t> pilot_counts(std::size_t m, std::uint64_t d, Rng& rng);

/// estimate_probs for a pilot in which row k of `scores` appears counts[k] times.
/// Agrees with estimate_probs on the expanded pilot, so pilots far larger than
/// m cost no more than one pass over the scores.
ProbabilityVector estimate_probs_from_counts(const DenseMatrix& scores, std::span<const std::uint64_t> counts,
                                             const DenseMatrix& v, std::size_t m);

/// Row-sum estimate from the (possibly stabilized) selected scores.
/// adaptive: sum + (m - d) * g;  simple: (m / d) * sum;  off: sum.
std::vector<double> row_norm_estimate(const DenseMatrix& column_scores, std::span<const double> geo_mean,
                                      std::size_t m, RowNormMode mode);

struct SkeinResult {
  DenseMatrix output;
  SkeinTrace trace;
};

SkeinResult skein_attention(const AttentionInput& input, const SkeinConfig& cfg);

}  // namespace skein
