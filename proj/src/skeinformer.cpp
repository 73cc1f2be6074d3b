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

#include "skein/skeinformer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "skein/oracle.hpp"

namespace skein {

std::vector<std::size_t> pilot_sample(std::size_t m, std::size_t d, Rng& rng) {
  if (m == 0) throw InvalidArgument("pilot_sample: unpadded length must be positive");
  if (d == 0) throw InvalidArgument("pilot_sample: pilot size must be positive");
  std::vector<std::size_t> rows(d);
  for (auto& r : rows) r = rng.uniform_index(m);
  return rows;
}

DenseMatrix pilot_scores(const AttentionInput& input, std::span<const std::size_t> rows) {
  DenseMatrix out(rows.size(), input.n());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= input.m()) throw InvalidArgument("pilot_scores: pilot row in padded range");
    softmax_scores_row(input, rows[k], out.row(k));
  }
  return out;
}

namespace {

// Weighted column norms of the pilot: row k of `pilot` counts `weight(k)` times.
template <typename Weight>
ProbabilityVector pilot_probs(const DenseMatrix& pilot, const DenseMatrix& v, std::size_t m, Weight weight) {
  const std::size_t n = pilot.cols();
  std::vector<double> col_sq(n, 0.0);
  for (std::size_t k = 0; k < pilot.rows(); ++k) {
    const double w = weight(k);
    if (w == 0.0) continue;
    auto row = pilot.row(k);
    for (std::size_t i = 0; i < m; ++i) col_sq[i] += w * row[i] * row[i];
  }
  std::vector<double> weights(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double v_sq = 0.0;
    for (double x : v.row(i)) v_sq += x * x;
    weights[i] = std::sqrt(col_sq[i]) * std::sqrt(v_sq);
  }
  return normalize_weights(weights, m);
}

struct EngineRef {
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return rng.next_u64(); }
  Rng& rng;
};

}  // namespace

ProbabilityVector estimate_probs(const DenseMatrix& pilot, const DenseMatrix& v, std::size_t m) {
  const std::size_t n = pilot.cols();
  if (v.rows() != n) throw InvalidArgument("estimate_probs: V rows must match pilot columns");
  if (m == 0 || m > n) throw InvalidArgument("estimate_probs: unpadded length out of range");
  return pilot_probs(pilot, v, m, [](std::size_t) { return 1.0; });
}

std::vector<std::uint64_t> pilot_counts(std::size_t m, std::uint64_t d, Rng& rng) {
  if (m == 0) throw InvalidArgument("pilot_counts: m must be positive");
  std::vector<std::uint64_t> counts(m, 0);
  EngineRef engine{rng};
  std::uint64_t remaining = d;
  for (std::size_t j = 0; j + 1 < m && remaining > 0; ++j) {
    std::binomial_distribution<std::uint64_t> draw(remaining, 1.0 / static_cast<double>(m - j));
    counts[j] = draw(engine);
    remaining -= counts[j];
  }
  counts[m - 1] += remaining;
  return counts;
}

ProbabilityVector estimate_probs_from_counts(const DenseMatrix& scores, std::span<const std::uint64_t> counts,
                                             const DenseMatrix& v, std::size_t m) {
  const std::size_t n = scores.cols();
  if (v.rows() != n) throw InvalidArgument("estimate_probs_from_counts: V rows must match score columns");
  if (m == 0 || m > n) throw InvalidArgument("estimate_probs_from_counts: unpadded length out of range");
  if (counts.size() > scores.rows()) {
    throw InvalidArgument("estimate_probs_from_counts: more counts than score rows");
  }
  return pilot_probs(scores, v, m, [&](std::size_t k) {
    return k < counts.size() ? static_cast<double>(counts[k]) : 0.0;
  });
}

std::vector<double> row_norm_estimate(const DenseMatrix& column_scores, std::span<const double> geo_mean,
                                      std::size_t m, RowNormMode mode) {
  const std::size_t d = column_scores.cols();
  if (geo_mean.size() != column_scores.rows()) {
    throw InvalidArgument("row_norm_estimate: geometric-mean length must match score rows");
  }
  if (d == 0 || d > m || m > column_scores.rows()) {
    throw InvalidArgument("row_norm_estimate: need 1 <= d <= m <= n");
  }
  const double unselected = static_cast<double>(m - d);
  const double plug_in = static_cast<double>(m) / static_cast<double>(d);
  std::vector<double> out(column_scores.rows(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (double a : column_scores.row(i)) sum += a;
    switch (mode) {
      case RowNormMode::adaptive: out[i] = sum + unselected * geo_mean[i]; break;
      case RowNormMode::simple: out[i] = plug_in * sum; break;
      case RowNormMode::off: out[i] = sum; break;
    }
    if (!(out[i] > 0.0) || !std::isfinite(out[i])) {
      throw InternalError("row_norm_estimate: row " + std::to_string(i) +
                          " has a non-positive or non-finite normalizer");
    }
  }
  return out;
}

SkeinResult skein_attention(const AttentionInput& input, const SkeinConfig& cfg) {
  if (cfg.d < 1) throw InvalidArgument("skein_attention: d must be at least 1");
  const std::size_t n = input.n();
  const std::size_t p = input.p();
  const std::size_t m = input.m();
  const auto& v = input.v();

  SkeinResult result;
  SkeinTrace& trace = result.trace;

  if (cfg.d >= m) {
    trace.exact_fallback = true;
    trace.score_entries = static_cast<std::uint64_t>(m) * m;
    result.output = exact_attention(input);
    trace.output = result.output;
    return result;
  }

  Rng rng(cfg.seed);
  const bool need_pilot = cfg.sampling == SamplingMode::importance || cfg.reuse_pilot;
  if (need_pilot) {
    trace.pilot_rows = pilot_sample(m, cfg.d, rng);
    trace.pilot_scores = pilot_scores(input, trace.pilot_rows);
    trace.score_entries += static_cast<std::uint64_t>(cfg.d) * m;
  }

  ProbabilityVector probs = cfg.sampling == SamplingMode::importance
                                ? estimate_probs(trace.pilot_scores, v, m)
                                : normalize_weights(std::vector<double>(n, 1.0), m);
  trace.p_hat = std::move(probs.probs);
  trace.p_hat_degenerate = probs.degenerate;

  const auto positive = static_cast<std::size_t>(
      std::ranges::count_if(trace.p_hat, [](double x) { return x > 0.0; }));
  const std::size_t d = std::min(cfg.d, positive);
  trace.columns = sample_without_replacement(trace.p_hat, d, rng);

  // Column sampling, stabilized per row.
  trace.column_scores = DenseMatrix(n, d);
  trace.row_shift.assign(n, 0.0);
  trace.geo_mean.assign(n, 0.0);
  std::vector<double> logits(d);
  for (std::size_t i = 0; i < m; ++i) {
    double shift = -std::numeric_limits<double>::infinity();
    double mean_logit = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      logits[k] = input.logit(i, trace.columns[k]);
      shift = std::max(shift, logits[k]);
      mean_logit += logits[k];
    }
    mean_logit /= static_cast<double>(d);
    auto a = trace.column_scores.row(i);
    for (std::size_t k = 0; k < d; ++k) a[k] = std::exp(logits[k] - shift);
    trace.row_shift[i] = shift;
    trace.geo_mean[i] = std::exp(mean_logit - shift);
  }
  trace.score_entries += static_cast<std::uint64_t>(d) * m;

  trace.row_sums = row_norm_estimate(trace.column_scores, trace.geo_mean, m, cfg.row_norm);

  std::vector<char> selected(n, 0);
  for (std::size_t j : trace.columns) selected[j] = 1;
  trace.unselected_value_sum.assign(p, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (selected[j]) continue;
    auto vj = v.row(j);
    for (std::size_t c = 0; c < p; ++c) trace.unselected_value_sum[c] += vj[c];
  }

  const bool fill = cfg.row_norm != RowNormMode::off;
  DenseMatrix out(n, p);
  for (std::size_t i = 0; i < m; ++i) {
    auto dst = out.row(i);
    auto a = trace.column_scores.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      auto vk = v.row(trace.columns[k]);
      for (std::size_t c = 0; c < p; ++c) dst[c] += a[k] * vk[c];
    }
    if (fill) {
      const double g = trace.geo_mean[i];
      for (std::size_t c = 0; c < p; ++c) dst[c] += g * trace.unselected_value_sum[c];
    }
    const double inv = 1.0 / trace.row_sums[i];
    for (double& x : dst) x *= inv;
  }

  if (cfg.reuse_pilot) {
    for (std::size_t k = 0; k < trace.pilot_rows.size(); ++k) {
      auto dst = out.row(trace.pilot_rows[k]);
      std::ranges::fill(dst, 0.0);
      auto b = trace.pilot_scores.row(k);
      for (std::size_t j = 0; j < m; ++j) {
        auto vj = v.row(j);
        for (std::size_t c = 0; c < p; ++c) dst[c] += b[j] * vj[c];
      }
    }
  }

  if (!out.all_finite()) throw InternalError("skein_attention: non-finite output");
  trace.output = out;
  result.output = std::move(out);
  return result;
}

}  // namespace skein
