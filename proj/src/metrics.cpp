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

#include "skein/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "skein/sketch.hpp"
#include "skein/skeinformer.hpp"

namespace skein {

namespace {

// Gram matrix of the smaller side: M^T M when rows >= cols, else M M^T.
DenseMatrix small_gram(const DenseMatrix& m) {
  if (m.rows() >= m.cols()) {
    DenseMatrix g(m.cols(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      for (std::size_t a = 0; a < row.size(); ++a) {
        if (row[a] == 0.0) continue;
        auto ga = g.row(a);
        for (std::size_t b = 0; b < row.size(); ++b) ga[b] += row[a] * row[b];
      }
    }
    return g;
  }
  DenseMatrix g(m.rows(), m.rows());
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = a; b < m.rows(); ++b) {
      double dot = 0.0;
      auto ra = m.row(a);
      auto rb = m.row(b);
      for (std::size_t c = 0; c < ra.size(); ++c) dot += ra[c] * rb[c];
      g(a, b) = dot;
      g(b, a) = dot;
    }
  }
  return g;
}

}  // namespace

SpectralNormResult spectral_norm(const DenseMatrix& m, double tol, std::size_t max_iter, RngSeed seed) {
  if (!(tol > 0.0)) throw InvalidArgument("spectral_norm: tolerance must be positive");
  SpectralNormResult result;
  if (std::ranges::all_of(m.data(), [](double x) { return x == 0.0; })) return result;

  const DenseMatrix g = small_gram(m);
  const std::size_t k = g.rows();
  Rng rng(seed);
  std::vector<double> x(k), y(k);
  auto normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    const double inv = 1.0 / std::sqrt(s);
    for (double& e : v) e *= inv;
  };
  for (double& e : x) e = rng.normal();
  normalize(x);

  // Rayleigh quotients of power iterates on a PSD matrix increase
  // monotonically. Stop once the step and the geometric tail it predicts
  // are both below tol relative to the current estimate.
  double lambda = 0.0;
  double prev_step = std::numeric_limits<double>::infinity();
  result.converged = false;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    for (std::size_t a = 0; a < k; ++a) {
      auto ga = g.row(a);
      double dot = 0.0;
      for (std::size_t b = 0; b < k; ++b) dot += ga[b] * x[b];
      y[a] = dot;
    }
    double next = 0.0;
    for (std::size_t a = 0; a < k; ++a) next += x[a] * y[a];
    const double step = next - lambda;
    lambda = next;
    result.iterations = it;
    x = y;
    normalize(x);

    const double floor = 8 * std::numeric_limits<double>::epsilon() * lambda;
    if (it > 1 && std::abs(step) <= floor) {
      result.converged = true;
      break;
    }
    if (it > 1 && step <= tol * lambda) {
      const double ratio = step / prev_step;
      if (ratio < 1.0 && step * ratio / (1.0 - ratio) <= tol * lambda) {
        result.converged = true;
        break;
      }
    }
    prev_step = step;
  }
  result.value = std::sqrt(std::max(lambda, 0.0));
  return result;
}

ErrorReport error_report(const DenseMatrix& exact, const DenseMatrix& approx,
                         std::optional<std::size_t> unpadded_len) {
  if (!exact.same_shape(approx)) throw InvalidArgument("error_report: shape mismatch");
  const std::size_t m = unpadded_len.value_or(exact.rows());
  if (m > exact.rows()) throw InvalidArgument("error_report: unpadded length exceeds rows");
  const DenseMatrix ref = top_rows(exact, m);
  const DenseMatrix diff = subtract(ref, top_rows(approx, m));

  ErrorReport r;
  r.spectral_loss = spectral_norm(diff).value;
  r.frobenius_loss = frobenius_norm(diff);
  const double ref_spectral = spectral_norm(ref).value;
  const double ref_frobenius = frobenius_norm(ref);
  auto relative = [](double loss, double base) {
    if (base > 0.0) return loss / base;
    return loss == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  r.relative_spectral = relative(r.spectral_loss, ref_spectral);
  r.relative_frobenius = relative(r.frobenius_loss, ref_frobenius);
  return r;
}

namespace {

struct FlopsRow {
  std::string_view method;
  std::string_view formula;
  std::uint64_t (*count)(std::uint64_t n, std::uint64_t p, std::uint64_t d);
};

constexpr std::array<FlopsRow, 5> kFlopsTable{{
    {"standard", "2n^2p", [](std::uint64_t n, std::uint64_t p, std::uint64_t) { return 2 * n * n * p; }},
    {"linformer", "4ndp", [](std::uint64_t n, std::uint64_t p, std::uint64_t d) { return 4 * n * d * p; }},
    {"informer", "3ndp", [](std::uint64_t n, std::uint64_t p, std::uint64_t d) { return 3 * n * d * p; }},
    {"skeinformer", "4ndp", [](std::uint64_t n, std::uint64_t p, std::uint64_t d) { return 4 * n * d * p; }},
    {"vmean", "np", [](std::uint64_t n, std::uint64_t p, std::uint64_t) { return n * p; }},
}};

constexpr std::array<std::string_view, 5> kFlopsMethods{"standard", "linformer", "informer",
                                                        "skeinformer", "vmean"};

const FlopsRow& flops_row(std::string_view method) {
  for (const auto& row : kFlopsTable) {
    if (row.method == method) return row;
  }
  throw InvalidArgument("flops_estimate: unknown method '" + std::string(method) + "'");
}

}  // namespace

std::uint64_t flops_estimate(std::string_view method, std::uint64_t n, std::uint64_t p, std::uint64_t d) {
  return flops_row(method).count(n, p, d);
}

std::string_view flops_formula(std::string_view method) { return flops_row(method).formula; }

std::span<const std::string_view> flops_methods() { return kFlopsMethods; }

BoundParams make_bound_params(double beta, double delta, double column_floor) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  BoundParams b;
  b.beta = beta;
  b.delta = delta;
  b.eta = 1.0 + std::sqrt((8.0 / beta) * std::log(1.0 / delta));
  b.C = column_floor;
  return b;
}

double binomial_tolerance(double delta, std::size_t trials) {
  return delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
}

namespace {

AttentionInput make_instance(const InstanceGenerator& gen, std::size_t n, std::size_t p, double stdev,
                             RngSeed seed) {
  return gen ? gen(seed) : gaussian_attention_input(n, p, stdev, seed);
}

double squared_frobenius(const DenseMatrix& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return s;
}

struct Prop1Trial {
  double sq_error = 0.0;
  double bound = 0.0;
  double beta = 1.0;
};

}  // namespace

Prop1Report verify_prop1(const Prop1Config& cfg) {
  if (cfg.trials < 100) throw InvalidArgument("verify_prop1: need at least 100 trials");
  if (cfg.d < 1) throw InvalidArgument("verify_prop1: d must be at least 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidArgument("verify_prop1: delta must lie in (0, 1)");
  if (!(cfg.flatten >= 0.0 && cfg.flatten < 1.0)) {
    throw InvalidArgument("verify_prop1: flatten must lie in [0, 1)");
  }

  std::vector<Prop1Trial> results(cfg.trials);
  detail::parallel_for(cfg.trials, [&](std::size_t t) {
    const RngSeed trial_seed = cfg.seed.derive(t);
    const AttentionInput input = make_instance(cfg.instance, cfg.n, cfg.p, cfg.stdev, trial_seed.derive(0));
    const std::size_t m = input.m();
    const auto scores = score_matrices(input, cfg.oracle_cap);
    const DenseMatrix& b = scores.B;
    const DenseMatrix& v = input.v();
    const DenseMatrix exact = multiply(b, v);

    const auto optimal = optimal_subsample_probs(b, v, m);
    std::vector<double> probs(input.n(), 0.0);
    double beta = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      probs[i] = (1.0 - cfg.flatten) * optimal.probs[i] + cfg.flatten / static_cast<double>(m);
      if (optimal.probs[i] > 0.0 && !optimal.degenerate) beta = std::min(beta, probs[i] / optimal.probs[i]);
    }
    // Renormalize against rounding in the mixture.
    double total = 0.0;
    for (double x : probs) total += x;
    for (double& x : probs) x /= total;

    SketchSpec spec{SketchKind::subsample_with_replacement, cfg.d, 0, probs, trial_seed.derive(1)};
    const auto draw = draw_subsample(spec);
    DenseMatrix approx(input.n(), input.p());
    for (std::size_t k = 0; k < draw.indices.size(); ++k) {
      const std::size_t col = draw.indices[k];
      const double w = draw.scale[k] * draw.scale[k];
      auto vk = v.row(col);
      for (std::size_t r = 0; r < m; ++r) {
        const double coef = w * b(r, col);
        auto dst = approx.row(r);
        for (std::size_t c = 0; c < vk.size(); ++c) dst[c] += coef * vk[c];
      }
    }
    const auto params = make_bound_params(beta, cfg.delta);
    Prop1Trial out;
    out.sq_error = squared_frobenius(subtract(exact, approx));
    out.bound = params.eta * params.eta / (beta * static_cast<double>(cfg.d)) * squared_frobenius(b) *
                squared_frobenius(v);
    out.beta = beta;
    results[t] = out;
  });

  Prop1Report report;
  report.trials = cfg.trials;
  double sum = 0.0, sum_sq = 0.0, bound_sum = 0.0;
  for (const auto& r : results) {
    if (r.sq_error > r.bound) ++report.violations;
    report.min_beta = std::min(report.min_beta, r.beta);
    sum += r.sq_error;
    sum_sq += r.sq_error * r.sq_error;
    bound_sum += r.bound;
  }
  const double t = static_cast<double>(cfg.trials);
  report.violation_rate = static_cast<double>(report.violations) / t;
  report.tolerance = binomial_tolerance(cfg.delta, cfg.trials);
  report.passed = report.violation_rate <= report.tolerance;
  report.mean_sq_error = sum / t;
  const double var = std::max(0.0, (sum_sq - t * report.mean_sq_error * report.mean_sq_error) / (t - 1.0));
  report.se_sq_error = std::sqrt(var / t);
  report.mean_bound = bound_sum / t;
  return report;
}

namespace {

constexpr double kMaxLemmaPilot = 9007199254740992.0;  // 2^53

struct Lemma1Trial {
  bool failed = false;
  bool capped = false;
  bool oversized = false;
  double required = 0.0;
  std::uint64_t pilot = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
};

}  // namespace

Lemma1Report verify_lemma1(const Lemma1Config& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 0.5)) {
    throw InvalidArgument("verify_lemma1: delta must lie in (0, 1/2)");
  }
  if (cfg.trials < 1) throw InvalidArgument("verify_lemma1: need at least one trial");
  const double beta = std::sqrt(1.0 / 3.0);

  std::vector<Lemma1Trial> results(cfg.trials);
  detail::parallel_for(cfg.trials, [&](std::size_t t) {
    const RngSeed trial_seed = cfg.seed.derive(t);
    const AttentionInput input = make_instance(cfg.instance, cfg.n, cfg.p, cfg.stdev, trial_seed.derive(0));
    const std::size_t m = input.m();
    const auto scores = score_matrices(input, cfg.oracle_cap);

    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < m; ++j) sq += scores.B(j, i) * scores.B(j, i);
      floor = std::min(floor, sq / static_cast<double>(m));
    }
    Lemma1Trial out;
    out.required = std::ceil(2.0 / (floor * floor) * std::log(2.0 * static_cast<double>(m) / cfg.delta));
    out.oversized = out.required > static_cast<double>(m);
    out.capped = !(out.required <= kMaxLemmaPilot);
    out.pilot = out.capped ? static_cast<std::uint64_t>(kMaxLemmaPilot) : static_cast<std::uint64_t>(out.required);

    // Only the multiplicity of each pilot row matters, so the pilot is drawn as counts.
    Rng rng(trial_seed.derive(1));
    const auto counts = pilot_counts(m, out.pilot, rng);
    const auto estimated = estimate_probs_from_counts(scores.B, counts, input.v(), m);
    const auto optimal = optimal_subsample_probs(scores.B, input.v(), m);
    for (std::size_t i = 0; i < m; ++i) {
      if (optimal.probs[i] <= 0.0) continue;
      const double ratio = estimated.probs[i] / optimal.probs[i];
      out.min_ratio = std::min(out.min_ratio, ratio);
      if (estimated.probs[i] < beta * optimal.probs[i]) out.failed = true;
    }
    results[t] = out;
  });

  Lemma1Report report;
  report.trials = cfg.trials;
  report.min_pilot = std::numeric_limits<std::uint64_t>::max();
  report.min_ratio = std::numeric_limits<double>::infinity();
  double required_sum = 0.0;
  for (const auto& r : results) {
    report.failures += r.failed ? 1 : 0;
    report.oversized_trials += r.oversized ? 1 : 0;
    report.capped_trials += r.capped ? 1 : 0;
    report.capped_failures += (r.capped && r.failed) ? 1 : 0;
    required_sum += r.required;
    report.min_pilot = std::min(report.min_pilot, r.pilot);
    report.max_pilot = std::max(report.max_pilot, r.pilot);
    report.min_ratio = std::min(report.min_ratio, r.min_ratio);
  }
  const double t = static_cast<double>(cfg.trials);
  report.failure_rate = static_cast<double>(report.failures) / t;
  report.tolerance = binomial_tolerance(cfg.delta, cfg.trials);
  report.passed = report.failure_rate <= report.tolerance;
  report.mean_required_pilot = required_sum / t;
  return report;
}

}  // namespace skein
