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

#include "skein/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace skein {

namespace {

constexpr double kProbSumTolerance = 1e-12;

bool is_subsample(SketchKind kind) { return kind != SketchKind::gaussian; }

}  // namespace

void validate(const SketchSpec& spec) {
  if (spec.width < 1) throw InvalidArgument("sketch width must be at least 1");
  if (!is_subsample(spec.kind)) {
    if (spec.rows < 1) throw InvalidArgument("gaussian sketch needs rows >= 1");
    return;
  }
  if (spec.probs.empty()) throw InvalidArgument("subsample sketch needs a probability vector");
  double total = 0.0;
  std::size_t positive = 0;
  for (double p : spec.probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("sampling probabilities must be finite and nonnegative");
    }
    total += p;
    positive += p > 0.0 ? 1 : 0;
  }
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    throw InvalidArgument("sampling probabilities must sum to 1");
  }
  if (spec.kind == SketchKind::subsample_without_replacement && positive < spec.width) {
    throw InvalidArgument("without-replacement sketch of width " + std::to_string(spec.width) +
                          " needs at least that many positive probabilities, got " +
                          std::to_string(positive));
  }
}

std::vector<std::size_t> sample_with_replacement(std::span<const double> weights, std::size_t count,
                                                 Rng& rng) {
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double total = cumulative.empty() ? 0.0 : cumulative.back();
  if (!(total > 0.0)) throw InvalidArgument("sample_with_replacement: all weights are zero");

  std::vector<std::size_t> out(count);
  for (auto& idx : out) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    // u < total, so `it` is in range unless rounding pushed u onto the last sum.
    if (it == cumulative.end()) it = std::prev(it);
    idx = static_cast<std::size_t>(it - cumulative.begin());
    while (weights[idx] <= 0.0) --idx;  // only reachable through that rounding case
  }
  return out;
}

std::vector<std::size_t> sample_without_replacement(std::span<const double> weights,
                                                    std::size_t count, Rng& rng) {
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double u = rng.uniform_positive();
    if (weights[i] > 0.0) keyed.emplace_back(-std::log(u) / weights[i], i);
  }
  if (keyed.size() < count) {
    throw InvalidArgument("sample_without_replacement: fewer positive weights than requested");
  }
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(count), keyed.end());
  std::vector<std::size_t> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = keyed[k].second;
  return out;
}

SubsampleDraw draw_subsample(const SketchSpec& spec) {
  validate(spec);
  if (!is_subsample(spec.kind)) throw InvalidArgument("draw_subsample: gaussian spec");
  Rng rng(spec.seed);
  SubsampleDraw draw;
  const double d = static_cast<double>(spec.width);
  if (spec.kind == SketchKind::subsample_with_replacement) {
    draw.indices = sample_with_replacement(spec.probs, spec.width, rng);
    draw.scale.reserve(spec.width);
    for (std::size_t idx : draw.indices) draw.scale.push_back(1.0 / std::sqrt(d * spec.probs[idx]));
  } else {
    draw.indices = sample_without_replacement(spec.probs, spec.width, rng);
    draw.scale.assign(spec.width, 1.0);
  }
  return draw;
}

DenseMatrix gaussian_sketch(std::size_t n, std::size_t d, RngSeed seed) {
  if (n < 1 || d < 1) throw InvalidArgument("gaussian_sketch: dimensions must be positive");
  return generate_gaussian_matrix(n, d, 1.0 / std::sqrt(static_cast<double>(d)), seed);
}

DenseMatrix materialize_sketch(const SketchSpec& spec) {
  validate(spec);
  if (!is_subsample(spec.kind)) return gaussian_sketch(spec.rows, spec.width, spec.seed);
  const auto draw = draw_subsample(spec);
  DenseMatrix s(spec.n(), spec.width);
  for (std::size_t k = 0; k < spec.width; ++k) s(draw.indices[k], k) = draw.scale[k];
  return s;
}

ProbabilityVector normalize_weights(std::span<const double> weights, std::size_t support) {
  support = std::min(support, weights.size());
  ProbabilityVector out{std::vector<double>(weights.size(), 0.0), false};
  double total = 0.0;
  for (std::size_t i = 0; i < support; ++i) total += weights[i];
  if (!(total > 0.0) || !std::isfinite(total)) {
    out.degenerate = true;
    for (std::size_t i = 0; i < support; ++i) out.probs[i] = 1.0 / static_cast<double>(support);
    return out;
  }
  for (std::size_t i = 0; i < support; ++i) out.probs[i] = weights[i] / total;
  return out;
}

ProbabilityVector optimal_subsample_probs(const DenseMatrix& B, const DenseMatrix& V,
                                          std::optional<std::size_t> unpadded_len) {
  const std::size_t n = B.cols();
  if (B.rows() != n || V.rows() != n) {
    throw InvalidArgument("optimal_subsample_probs: B must be n x n and V n x p");
  }
  std::vector<double> col_sq(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    auto row = B.row(j);
    for (std::size_t i = 0; i < n; ++i) col_sq[i] += row[i] * row[i];
  }
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v_sq = 0.0;
    for (double x : V.row(i)) v_sq += x * x;
    weights[i] = std::sqrt(col_sq[i]) * std::sqrt(v_sq);
  }
  return normalize_weights(weights, unpadded_len.value_or(n));
}

double jl_distortion_check(std::size_t n, std::size_t d, double epsilon, std::size_t trials,
                           RngSeed seed, const SketchFactory& factory) {
  if (n < 1 || d < 1) throw InvalidArgument("jl_distortion_check: n and d must be positive");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw InvalidArgument("jl_distortion_check: epsilon must lie in (0, 1/2]");
  }
  if (trials < 1) throw InvalidArgument("jl_distortion_check: need at least one trial");

  std::size_t failures = 0;
  std::vector<double> b(n);
  std::vector<double> sketched(d);
  for (std::size_t t = 0; t < trials; ++t) {
    const RngSeed trial = seed.derive(t);
    const DenseMatrix s = factory ? factory(n, d, trial.derive(0)) : gaussian_sketch(n, d, trial.derive(0));
    if (s.rows() != n || s.cols() != d) throw InvalidArgument("sketch factory returned wrong shape");

    Rng rng(trial.derive(1));
    double norm_sq = 0.0;
    for (double& x : b) {
      x = rng.normal();
      norm_sq += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : b) x *= inv;

    std::ranges::fill(sketched, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto si = s.row(i);
      for (std::size_t k = 0; k < d; ++k) sketched[k] += si[k] * b[i];
    }
    double sketched_sq = 0.0;
    for (double x : sketched) sketched_sq += x * x;
    if (std::abs(sketched_sq - 1.0) > epsilon) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

UnbiasednessReport verify_sketch_unbiased(const SketchSpec& spec, std::size_t trials) {
  validate(spec);
  if (trials < 2) throw InvalidArgument("verify_sketch_unbiased: need at least two trials");
  const std::size_t n = spec.n();
  const std::size_t d = spec.width;

  // Welford accumulation per entry of S S^T.
  DenseMatrix mean(n, n);
  DenseMatrix m2(n, n);
  DenseMatrix outer(n, n);
  SketchSpec trial_spec = spec;
  for (std::size_t t = 0; t < trials; ++t) {
    trial_spec.seed = spec.seed.derive(t);
    const DenseMatrix s = materialize_sketch(trial_spec);
    for (std::size_t a = 0; a < n; ++a) {
      auto sa = s.row(a);
      for (std::size_t b = 0; b < n; ++b) {
        auto sb = s.row(b);
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += sa[k] * sb[k];
        outer(a, b) = dot;
      }
    }
    const double count = static_cast<double>(t + 1);
    auto mu = mean.data();
    auto acc = m2.data();
    auto x = outer.data();
    for (std::size_t e = 0; e < mu.size(); ++e) {
      const double delta = x[e] - mu[e];
      mu[e] += delta / count;
      acc[e] += delta * (x[e] - mu[e]);
    }
  }

  UnbiasednessReport report;
  report.trials = trials;
  report.std_error = DenseMatrix(n, n);
  const double tcount = static_cast<double>(trials);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double target = a == b ? 1.0 : 0.0;
      const double dev = std::abs(mean(a, b) - target);
      const double se = std::sqrt(m2(a, b) / (tcount - 1.0) / tcount);
      report.std_error(a, b) = se;
      report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
      if (se > 0.0) {
        report.max_z = std::max(report.max_z, dev / se);
      } else if (dev > 1e-12) {
        report.exact_entries_ok = false;
      }
    }
  }
  report.mean = std::move(mean);
  return report;
}

}  // namespace skein
