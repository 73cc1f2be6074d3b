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

#include "skein/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "skein/sketch.hpp"

namespace skein {

namespace {

std::vector<double> unpadded_value_mean(const AttentionInput& input) {
  std::vector<double> mean(input.p(), 0.0);
  for (std::size_t j = 0; j < input.m(); ++j) {
    auto vj = input.v().row(j);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += vj[c];
  }
  for (double& x : mean) x /= static_cast<double>(input.m());
  return mean;
}

void check_sketch(const AttentionInput& input, const DenseMatrix& sketch) {
  if (sketch.rows() != input.m() || sketch.cols() < 1) {
    throw InvalidArgument("sketch must be m x d with d >= 1 (m = unpadded length)");
  }
}

// S^T V over the unpadded rows: d x p.
DenseMatrix sketch_values(const AttentionInput& input, const DenseMatrix& sketch) {
  DenseMatrix out(sketch.cols(), input.p());
  for (std::size_t j = 0; j < input.m(); ++j) {
    auto sj = sketch.row(j);
    auto vj = input.v().row(j);
    for (std::size_t k = 0; k < sketch.cols(); ++k) {
      auto dst = out.row(k);
      for (std::size_t c = 0; c < vj.size(); ++c) dst[c] += sj[k] * vj[c];
    }
  }
  return out;
}

}  // namespace

DenseMatrix vmean_attention(const AttentionInput& input) {
  const auto mean = unpadded_value_mean(input);
  DenseMatrix out(input.n(), input.p());
  for (std::size_t i = 0; i < input.m(); ++i) std::ranges::copy(mean, out.row(i).begin());
  return out;
}

DenseMatrix linformer_attention(const AttentionInput& input, std::size_t d, RngSeed seed) {
  if (d < 1) throw InvalidArgument("linformer_attention: d must be at least 1");
  return linformer_attention(input, gaussian_sketch(input.m(), d, seed));
}

DenseMatrix linformer_attention(const AttentionInput& input, const DenseMatrix& sketch) {
  check_sketch(input, sketch);
  const std::size_t d = sketch.cols();
  const std::size_t p = input.p();

  // K^T S, p x d.
  DenseMatrix keys(p, d);
  for (std::size_t j = 0; j < input.m(); ++j) {
    auto kj = input.k().row(j);
    auto sj = sketch.row(j);
    for (std::size_t c = 0; c < p; ++c) {
      auto dst = keys.row(c);
      for (std::size_t k = 0; k < d; ++k) dst[k] += kj[c] * sj[k];
    }
  }
  const DenseMatrix values = sketch_values(input, sketch);

  DenseMatrix out(input.n(), p);
  std::vector<double> logits(d);
  for (std::size_t i = 0; i < input.m(); ++i) {
    std::ranges::fill(logits, 0.0);
    auto qi = input.q().row(i);
    for (std::size_t c = 0; c < p; ++c) {
      auto kc = keys.row(c);
      for (std::size_t k = 0; k < d; ++k) logits[k] += qi[c] * kc[k];
    }
    double shift = -std::numeric_limits<double>::infinity();
    for (double& x : logits) {
      x *= input.scale();
      shift = std::max(shift, x);
    }
    double sum = 0.0;
    for (double& x : logits) {
      x = std::exp(x - shift);
      sum += x;
    }
    auto dst = out.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      const double w = logits[k] / sum;
      auto vk = values.row(k);
      for (std::size_t c = 0; c < p; ++c) dst[c] += w * vk[c];
    }
  }
  return out;
}

DenseMatrix linformer_unreduced(const AttentionInput& input, std::size_t d, RngSeed seed,
                                std::size_t cap) {
  if (d < 1) throw InvalidArgument("linformer_unreduced: d must be at least 1");
  if (input.n() > cap) {
    throw ResourceLimit("linformer_unreduced: n exceeds oracle cap " + std::to_string(cap));
  }
  return linformer_unreduced(input, gaussian_sketch(input.m(), d, seed), cap);
}

DenseMatrix linformer_unreduced(const AttentionInput& input, const DenseMatrix& sketch,
                                std::size_t cap) {
  check_sketch(input, sketch);
  const std::size_t d = sketch.cols();
  const auto scores = score_matrices(input, cap);
  const DenseMatrix values = sketch_values(input, sketch);

  DenseMatrix out(input.n(), input.p());
  std::vector<double> bs(d);
  for (std::size_t i = 0; i < input.m(); ++i) {
    std::ranges::fill(bs, 0.0);
    auto bi = scores.B.row(i);
    for (std::size_t j = 0; j < input.m(); ++j) {
      auto sj = sketch.row(j);
      for (std::size_t k = 0; k < d; ++k) bs[k] += bi[j] * sj[k];
    }
    auto dst = out.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      auto vk = values.row(k);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += bs[k] * vk[c];
    }
  }
  return out;
}

double informer_sparsity(std::span<const double> scores) {
  if (scores.empty()) throw InvalidArgument("informer_sparsity: empty row");
  std::vector<double> logits(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (!(scores[j] > 0.0)) throw InvalidArgument("informer_sparsity: scores must be positive");
    logits[j] = std::log(scores[j]);
  }
  return informer_sparsity_from_logits(logits);
}

double informer_sparsity_from_logits(std::span<const double> logits) {
  if (logits.empty()) throw InvalidArgument("informer_sparsity: empty row");
  const double len = static_cast<double>(logits.size());
  const double top = *std::ranges::max_element(logits);
  double sum = 0.0;
  double mean = 0.0;
  for (double x : logits) {
    sum += std::exp(x - top);
    mean += x;
  }
  mean /= len;
  const double log_arith_mean = top + std::log(sum / len);
  return std::max(0.0, log_arith_mean - mean);
}

InformerSelection informer_select(const AttentionInput& input, std::size_t d, RngSeed seed) {
  if (d < 1) throw InvalidArgument("informer_select: d must be at least 1");
  const std::size_t m = input.m();
  InformerSelection sel;
  Rng rng(seed);
  sel.pilot_columns.resize(d);
  for (auto& c : sel.pilot_columns) c = rng.uniform_index(m);

  sel.sparsity.resize(m);
  std::vector<double> logits(d);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < d; ++k) logits[k] = input.logit(i, sel.pilot_columns[k]);
    sel.sparsity[i] = informer_sparsity_from_logits(logits);
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t top = std::min(d, m);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sel.sparsity[a] != sel.sparsity[b]) return sel.sparsity[a] > sel.sparsity[b];
                      return a < b;
                    });
  sel.selected_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top));
  return sel;
}

DenseMatrix informer_attention(const AttentionInput& input, std::size_t d, RngSeed seed,
                               std::uint64_t* score_entries) {
  if (d < 1) throw InvalidArgument("informer_attention: d must be at least 1");
  const std::size_t m = input.m();
  if (d >= m) {
    if (score_entries) *score_entries = static_cast<std::uint64_t>(m) * m;
    return exact_attention(input);
  }
  const auto sel = informer_select(input, d, seed);
  DenseMatrix out = vmean_attention(input);
  const DenseMatrix exact_rows = exact_attention_rows(input, sel.selected_rows);
  for (std::size_t r = 0; r < sel.selected_rows.size(); ++r) {
    std::ranges::copy(exact_rows.row(r), out.row(sel.selected_rows[r]).begin());
  }
  if (score_entries) *score_entries = 2 * static_cast<std::uint64_t>(d) * m;
  return out;
}

}  // namespace skein
