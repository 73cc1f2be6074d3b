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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "skein/core.hpp"

namespace skein {

enum class SketchKind { subsample_with_replacement, subsample_without_replacement, gaussian };

/// Description of an n x d sketching matrix.
///
/// Subsample kinds take n from `probs.size()`; the gaussian kind uses `rows`.
struct SketchSpec {
  SketchKind kind = SketchKind::gaussian;
  std::size_t width = 1;
  std::size_t rows = 0;
  std::vector<double> probs;
  RngSeed seed;

  std::size_t n() const noexcept { return kind == SketchKind::gaussian ? rows : probs.size(); }
};

/// Sampled columns of a sub-sampling sketch. Column k of S is
/// scale[k] * e_{indices[k]}. With replacement scale[k] = 1/sqrt(d p_i);
/// without replacement the columns are left unscaled (scale 1).
struct SubsampleDraw {
  std::vector<std::size_t> indices;
  std::vector<double> scale;
};

/// A probability vector plus a flag raised when the weights it came from were
/// all zero and a uniform fallback was used instead.
struct ProbabilityVector {
  std::vector<double> probs;
  bool degenerate = false;
};

/// Validates the SketchSpec invariants; throws InvalidArgument.
void validate(const SketchSpec& spec);

SubsampleDraw draw_subsample(const SketchSpec& spec);
DenseMatrix materialize_sketch(const SketchSpec& spec);

/// i.i.d. draws proportional to `weights` (need not be normalized).
std::vector<std::size_t> sample_with_replacement(std::span<const double> weights, std::size_t count,
                                                 Rng& rng);

/// Exponential race: each positive-weight index i gets key E_i / w_i with
/// E_i ~ Exp(1); the `count` smallest keys win, in increasing key order. The
/// result is distributed as successive draws proportional to the remaining
/// weights. Zero weights never win. Every index consumes exactly one uniform.
std::vector<std::size_t> sample_without_replacement(std::span<const double> weights,
                                                    std::size_t count, Rng& rng);

/// Column-norm/row-norm product probabilities for approximating B*V:
/// p_i proportional to ||B^(i)|| ||V_(i)||. Falls back to uniform over the
/// first `unpadded_len` indices (all of them by default) if every product is 0.
ProbabilityVector optimal_subsample_probs(const DenseMatrix& B, const DenseMatrix& V,
                                          std::optional<std::size_t> unpadded_len = std::nullopt);

/// Normalizes nonnegative weights over [0, support); entries past `support`
/// are zero. Uniform over the support when the total is zero.
ProbabilityVector normalize_weights(std::span<const double> weights, std::size_t support);

using SketchFactory = std::function<DenseMatrix(std::size_t n, std::size_t d, RngSeed seed)>;

/// Gaussian n x d sketch with N(0, 1/d) entries.
DenseMatrix gaussian_sketch(std::size_t n, std::size_t d, RngSeed seed);

/// Fraction of trials in which | ||S^T b||^2 - ||b||^2 | > epsilon ||b||^2 for
/// a fresh sketch S and a fresh random unit vector b. `factory` overrides the
/// Gaussian sketch.
double jl_distortion_check(std::size_t n, std::size_t d, double epsilon, std::size_t trials,
                           RngSeed seed, const SketchFactory& factory = {});

/// Monte Carlo check of E[S S^T] = I.
struct UnbiasednessReport {
  std::size_t trials = 0;
  DenseMatrix mean;        // entrywise mean of S S^T
  DenseMatrix std_error;   // entrywise standard error of that mean
  double max_abs_deviation = 0.0;
  double max_z = 0.0;      // max |mean - I| / SE over entries with SE > 0
  bool exact_entries_ok = true;  // zero-variance entries equal I exactly
  bool passed(double z_tolerance) const noexcept {
    return exact_entries_ok && max_z <= z_tolerance;
  }
};

/// `spec.seed` seeds the trial stream; trial t uses spec.seed.derive(t).
UnbiasednessReport verify_sketch_unbiased(const SketchSpec& spec, std::size_t trials);

}  // namespace skein
