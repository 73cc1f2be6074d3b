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

#include <doctest.h>

#include <cmath>

#include "skein/baselines.hpp"
#include "skein/metrics.hpp"
#include "skein/oracle.hpp"
#include "skein/sketch.hpp"
#include "test_support.hpp"

using namespace skein;

namespace {

AttentionInput random_input(std::mt19937_64& gen, std::size_t n, std::size_t p, std::size_t m) {
  return AttentionInput(test::random_matrix(n, p, gen), test::random_matrix(n, p, gen),
                        test::random_matrix(n, p, gen), m);
}

}  // namespace

TEST_CASE("vmean") {
  std::mt19937_64 gen(1);
  DenseMatrix v(6, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    v(i, 0) = 1.0;
    v(i, 1) = -2.0;
    v(i, 2) = 0.5;
  }
  const AttentionInput same(test::random_matrix(6, 3, gen), test::random_matrix(6, 3, gen), v);
  const auto out = vmean_attention(same);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(out(i, 0) == 1.0);
    CHECK(out(i, 1) == -2.0);
    CHECK(out(i, 2) == 0.5);
  }

  const AttentionInput zero_q(DenseMatrix(6, 3), test::random_matrix(6, 3, gen), test::random_matrix(6, 3, gen), 4);
  CHECK(test::max_abs(vmean_attention(zero_q), exact_attention(zero_q)) < 1e-12);
  for (double x : vmean_attention(zero_q).row(5)) CHECK(x == 0.0);
}

TEST_CASE("linformer with an identity sketch is exact") {
  std::mt19937_64 gen(2);
  const auto in = random_input(gen, 12, 3, 9);
  CHECK(test::max_abs(linformer_attention(in, DenseMatrix::identity(9)), exact_attention(in)) < 1e-10);
  CHECK(test::max_abs(linformer_unreduced(in, DenseMatrix::identity(9)), exact_attention(in)) < 1e-10);
  CHECK_THROWS_AS(linformer_attention(in, DenseMatrix::identity(12)), InvalidArgument);
}

TEST_CASE("linformer matches a straight-line dense evaluation") {
  std::mt19937_64 gen(3);
  const std::size_t n = 64, p = 5, d = 7;
  const auto in = random_input(gen, n, p, n);
  const auto s = gaussian_sketch(n, d, RngSeed{4, 0});
  // (Q K^T / sqrt(p)) S, row softmax, times S^T V.
  DenseMatrix logits = test::naive_product(in.q(), transpose(in.k()));
  for (double& x : logits.data()) x /= std::sqrt(static_cast<double>(p));
  DenseMatrix proj = test::naive_product(logits, s);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -INFINITY, sum = 0.0;
    for (double x : proj.row(i)) mx = std::max(mx, x);
    for (double& x : proj.row(i)) sum += (x = std::exp(x - mx));
    for (double& x : proj.row(i)) x /= sum;
  }
  const auto expected = test::naive_product(proj, test::naive_product(transpose(s), in.v()));
  CHECK(test::max_abs(linformer_attention(in, s), expected) < 1e-12);
  CHECK(linformer_attention(in, d, RngSeed{4, 0}) == linformer_attention(in, s));
  CHECK(linformer_attention(in, 3, RngSeed{1, 1}).rows() == n);
}

TEST_CASE("unreduced linformer is unbiased for BV") {
  std::mt19937_64 gen(4);
  const std::size_t n = 8, p = 2, trials = 100000;
  const auto in = random_input(gen, n, p, n);
  const auto bv = multiply(score_matrices(in).B, in.v());
  DenseMatrix sum(n, p), sum_sq(n, p);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto out = linformer_unreduced(in, 3, RngSeed{9, t});
    for (std::size_t e = 0; e < out.size(); ++e) {
      sum.data()[e] += out.data()[e];
      sum_sq.data()[e] += out.data()[e] * out.data()[e];
    }
  }
  for (std::size_t e = 0; e < bv.size(); ++e) {
    const double mean = sum.data()[e] / trials;
    const double se = std::sqrt((sum_sq.data()[e] / trials - mean * mean) / (trials - 1));
    CHECK(std::abs(mean - bv.data()[e]) <= 5.0 * se);
  }
  CHECK_THROWS_AS(linformer_unreduced(in, 2, RngSeed{}, 4), ResourceLimit);
}

TEST_CASE("unreduced linformer error shrinks with d") {
  std::vector<double> mean, se;
  for (std::size_t d : {8, 32, 128}) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t t = 0; t < 64; ++t) {
      const auto in = gaussian_attention_input(64, 4, 1.0, RngSeed{5, t});
      const double loss =
          error_report(exact_attention(in), linformer_unreduced(in, d, RngSeed{6 + d, t})).spectral_loss;
      s += loss;
      s2 += loss * loss;
    }
    mean.push_back(s / 64);
    se.push_back(std::sqrt((s2 / 64 - mean.back() * mean.back()) / 63));
  }
  for (std::size_t k = 1; k < mean.size(); ++k) CHECK(mean[k] <= mean[k - 1] + se[k - 1]);
}

TEST_CASE("informer sparsity") {
  CHECK(informer_sparsity(std::vector<double>{3.0, 3.0, 3.0}) == doctest::Approx(0.0));
  const std::vector<double> row{std::exp(2.0), 1.0};
  CHECK(informer_sparsity(row) == doctest::Approx(std::log((std::exp(2.0) + 1.0) / 2.0) - 1.0).epsilon(1e-14));
  CHECK(informer_sparsity(row) == doctest::Approx(0.4338).epsilon(1e-4));
  const std::vector<double> scaled{5.0 * std::exp(2.0), 5.0};
  CHECK(informer_sparsity(scaled) == doctest::Approx(informer_sparsity(row)).epsilon(1e-14));
  CHECK(informer_sparsity_from_logits(std::vector<double>{2.0, 0.0}) ==
        doctest::Approx(informer_sparsity(row)).epsilon(1e-14));
  CHECK_THROWS_AS(informer_sparsity(std::vector<double>{1.0, 0.0}), InvalidArgument);
}

TEST_CASE("informer with d >= m is exact") {
  std::mt19937_64 gen(7);
  const auto in = random_input(gen, 10, 3, 7);
  CHECK(test::max_abs(informer_attention(in, 7, RngSeed{}), test::naive_attention(in.q(), in.k(), in.v(), 7)) <
        1e-10);
}

TEST_CASE("informer on uniform scores equals vmean") {
  std::mt19937_64 gen(8);
  const AttentionInput in(DenseMatrix(16, 3), test::random_matrix(16, 3, gen), test::random_matrix(16, 3, gen));
  const auto sel = informer_select(in, 4, RngSeed{1, 0});
  for (double mi : sel.sparsity) CHECK(mi == 0.0);
  CHECK(sel.selected_rows == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(test::max_abs(informer_attention(in, 4, RngSeed{1, 0}), vmean_attention(in)) < 1e-12);
}

TEST_CASE("informer selects the spiky row first") {
  // Row 5 has logits (10, 0, ..., 0); all other rows are flat.
  const std::size_t n = 16, p = 4;
  DenseMatrix q(n, p), k(n, p);
  q(5, 0) = 10.0 * std::sqrt(static_cast<double>(p));
  k(0, 0) = 1.0;
  std::mt19937_64 gen(9);
  const AttentionInput in(q, k, test::random_matrix(n, p, gen));
  std::size_t hits = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto sel = informer_select(in, 6, RngSeed{s, 0});
    const bool saw_spike = std::find(sel.pilot_columns.begin(), sel.pilot_columns.end(), 0) != sel.pilot_columns.end();
    if (!saw_spike) continue;
    ++hits;
    CHECK(sel.selected_rows.front() == 5);
  }
  CHECK(hits > 0);
}

TEST_CASE("informer selected rows are exact and the rest are the mean") {
  std::mt19937_64 gen(10);
  const auto in = random_input(gen, 30, 4, 25);
  const auto sel = informer_select(in, 6, RngSeed{3, 0});
  const auto again = informer_select(in, 6, RngSeed{3, 0});
  CHECK(sel.selected_rows == again.selected_rows);
  CHECK(sel.pilot_columns == again.pilot_columns);
  std::uint64_t entries = 0;
  const auto out = informer_attention(in, 6, RngSeed{3, 0}, &entries);
  CHECK(entries == 2 * 6 * 25);
  const auto exact = test::naive_attention(in.q(), in.k(), in.v(), 25);
  const auto mean = vmean_attention(in);
  std::vector<char> chosen(30, 0);
  for (auto r : sel.selected_rows) chosen[r] = 1;
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t c = 0; c < 4; ++c) {
      if (i >= 25) {
        CHECK(out(i, c) == 0.0);
      } else if (chosen[i]) {
        CHECK(std::abs(out(i, c) - exact(i, c)) < 1e-10);
      } else {
        CHECK(out(i, c) == mean(i, c));
      }
    }
  }
}

TEST_CASE("baselines ignore extra padding") {
  std::mt19937_64 gen(11);
  const auto in = random_input(gen, 20, 3, 14);
  const auto padded = append_padding(in, 9);
  const auto a = informer_attention(in, 5, RngSeed{2, 2});
  const auto b = informer_attention(padded, 5, RngSeed{2, 2});
  CHECK(test::max_abs(top_rows(a, 14), top_rows(b, 14)) < 1e-10);
  CHECK(test::max_abs(top_rows(vmean_attention(in), 14), top_rows(vmean_attention(padded), 14)) < 1e-10);
  for (const auto& out : {b, linformer_attention(padded, 4, RngSeed{}), linformer_unreduced(padded, 4, RngSeed{})}) {
    CHECK(out.all_finite());
    for (std::size_t i = 14; i < out.rows(); ++i) {
      for (double x : out.row(i)) CHECK(x == 0.0);
    }
  }
}
