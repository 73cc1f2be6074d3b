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
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "skein/core.hpp"
#include "skein/oracle.hpp"

namespace skein {

struct SpectralNormResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

/// Largest singular value by power iteration on the smaller Gram matrix
/// (M^T M or M M^T), started from a seeded Gaussian vector.
SpectralNormResult spectral_norm(const DenseMatrix& m, double tol = 1e-8, std::size_t max_iter = 10000,
                                 RngSeed seed = {});

/// Spectral and Frobenius losses of an approximate attention output.
struct ErrorReport {
  double spectral_loss = 0.0;
  double frobenius_loss = 0.0;
  double relative_spectral = 0.0;
  double relative_frobenius = 0.0;
};

/// Compares rows [0, unpadded_len) only.
ErrorReport error_report(const DenseMatrix& exact, const DenseMatrix& approx,
                         std::optional<std::size_t> unpadded_len = std::nullopt);

/// Leading-term FLOP counts: standard 2n^2p, linformer 4ndp, informer 3ndp,
/// skeinformer 4ndp, vmean np. The vmean count is our own estimate; the
/// others follow the published table.
std::uint64_t flops_estimate(std::string_view method, std::uint64_t n, std::uint64_t p, std::uint64_t d);
std::string_view flops_formula(std::string_view method);
std::span<const std::string_view> flops_methods();

/// Parameters of the Frobenius-norm guarantee for sampled matrix products.
struct BoundParams {
  double beta = 1.0;   // quality coefficient in (0, 1]
  double delta = 0.1;  // failure probability in (0, 1)
  double eta = 0.0;    // 1 + sqrt((8 / beta) ln(1 / delta))
  double C = 0.0;      // column-norm floor min_i ||B^(i)||^2 / n
};

BoundParams make_bound_params(double beta, double delta, double column_floor = 0.0);

using InstanceGenerator = std::function<AttentionInput(RngSeed)>;

struct Prop1Config {
  std::size_t n = 64;
  std::size_t p = 8;
  std::size_t d = 16;
  double delta = 0.1;
  std::size_t trials = 500;
  RngSeed seed;
  double stdev = 1.0;
  /// Mixing weight toward uniform: probs = (1 - flatten) p_opt + flatten / m.
  /// 0 gives the optimal probabilities (beta = 1).
  double flatten = 0.0;
  InstanceGenerator instance;  // overrides Gaussian inputs
  std::size_t oracle_cap = kDefaultOracleCap;
};

struct Prop1Report {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double violation_rate = 0.0;
  double tolerance = 0.0;  // delta + 3 binomial standard errors
  bool passed = false;
  double min_beta = 1.0;
  double mean_sq_error = 0.0;  // mean of ||BV - BSS^T V||_F^2
  double se_sq_error = 0.0;
  double mean_bound = 0.0;
};

/// Draws a with-replacement sub-sampling sketch per trial and counts how often
/// ||BV - BSS^T V||_F^2 exceeds (eta^2 / (beta d)) ||B||_F^2 ||V||_F^2.
Prop1Report verify_prop1(const Prop1Config& cfg);

struct Lemma1Config {
  std::size_t n = 128;
  std::size_t p = 8;
  double delta = 0.2;
  std::size_t trials = 200;
  RngSeed seed;
  double stdev = 1.0;
  InstanceGenerator instance;
  std::size_t oracle_cap = kDefaultOracleCap;
};

struct Lemma1Report {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double failure_rate = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Trials whose required pilot size exceeded m (the pilot still uses it).
  std::size_t oversized_trials = 0;
  /// Trials whose required pilot size exceeded 2^53 and was clipped there.
  std::size_t capped_trials = 0;
  std::size_t capped_failures = 0;
  double mean_required_pilot = 0.0;
  std::uint64_t min_pilot = 0;
  std::uint64_t max_pilot = 0;
  double min_ratio = 0.0;  // smallest p_hat_i / p_i seen
};

/// Per trial: C from the realized scores, pilot size ceil((2 / C^2) ln(2m / delta)),
/// then checks p_hat_i >= sqrt(1/3) p_i for every unpadded i. The pilot is drawn
/// with replacement, so its size may exceed m; it is simulated through row counts.
Lemma1Report verify_lemma1(const Lemma1Config& cfg);

/// delta + 3 sqrt(delta (1 - delta) / trials).
double binomial_tolerance(double delta, std::size_t trials);

}  // namespace skein
