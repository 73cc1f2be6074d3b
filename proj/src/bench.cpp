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

#include "skein/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "parallel.hpp"
#include "skein/baselines.hpp"
#include "skein/skeinformer.hpp"
#include "skein/sketch.hpp"

namespace skein {

namespace {

constexpr std::array<std::string_view, 10> kMethods{
    "exact",           "skeinformer",          "skeinformer_uniform", "skeinformer_simple_rn",
    "skeinformer_no_rn", "skeinformer_no_reuse", "informer",            "linformer",
    "linformer_unreduced", "vmean"};

}  // namespace

std::span<const std::string_view> registered_methods() { return kMethods; }

bool is_registered_method(std::string_view name) {
  return std::ranges::find(kMethods, name) != kMethods.end();
}

MethodOutput run_method(std::string_view method, const AttentionInput& input, std::size_t d, RngSeed seed,
                        std::size_t oracle_cap) {
  const std::uint64_t m = input.m();
  if (method == "exact") {
    if (input.n() > oracle_cap) {
      throw ResourceLimit("exact attention: n exceeds oracle cap " + std::to_string(oracle_cap));
    }
    return {exact_attention(input), m * m};
  }
  if (method.starts_with("skeinformer")) {
    SkeinConfig cfg;
    cfg.d = d;
    cfg.seed = seed;
    if (method == "skeinformer_uniform") {
      cfg.sampling = SamplingMode::uniform;
    } else if (method == "skeinformer_simple_rn") {
      cfg.row_norm = RowNormMode::simple;
    } else if (method == "skeinformer_no_rn") {
      cfg.row_norm = RowNormMode::off;
    } else if (method == "skeinformer_no_reuse") {
      cfg.reuse_pilot = false;
    } else if (method != "skeinformer") {
      throw InvalidArgument("unknown method '" + std::string(method) + "'");
    }
    auto result = skein_attention(input, cfg);
    return {std::move(result.output), result.trace.score_entries};
  }
  if (method == "informer") {
    MethodOutput out;
    out.output = informer_attention(input, d, seed, &out.score_entries);
    return out;
  }
  if (method == "linformer") return {linformer_attention(input, d, seed), m * d};
  if (method == "linformer_unreduced") return {linformer_unreduced(input, d, seed, oracle_cap), m * m};
  if (method == "vmean") return {vmean_attention(input), 0};
  throw InvalidArgument("unknown method '" + std::string(method) + "'");
}

void validate(const SweepConfig& cfg) {
  if (cfg.n < 1 || cfg.p < 1) throw InvalidArgument("n and p must be positive");
  if (cfg.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (!(cfg.stdev > 0.0)) throw InvalidArgument("stdev must be positive");
  if (cfg.d_values.empty()) throw InvalidArgument("d list must not be empty");
  for (std::size_t d : cfg.d_values) {
    if (d < 1 || d > cfg.n) {
      throw InvalidArgument("every d must lie in [1, n]; got " + std::to_string(d));
    }
  }
  if (cfg.methods.empty()) throw InvalidArgument("method list must not be empty");
  for (const auto& m : cfg.methods) {
    if (!is_registered_method(m)) throw InvalidArgument("unknown method '" + m + "'");
  }
  if (cfg.n > cfg.oracle_cap) {
    throw InvalidArgument("n exceeds the oracle cap; the sweep needs exact outputs");
  }
}

const BenchAggregate& BenchResult::aggregate(std::string_view method, std::size_t d) const {
  for (const auto& a : aggregates) {
    if (a.method == method && a.d == d) return a;
  }
  throw InvalidArgument("no aggregate for " + std::string(method) + " at d=" + std::to_string(d));
}

BenchResult run_bench(const SweepConfig& cfg) {
  validate(cfg);
  const std::size_t methods = cfg.methods.size();
  const std::size_t widths = cfg.d_values.size();
  // slots[trial][method][d]
  std::vector<BenchRow> slots(cfg.trials * methods * widths);

  detail::parallel_for(
      cfg.trials,
      [&](std::size_t t) {
        const RngSeed trial_seed = cfg.seed.derive(t);
        const AttentionInput input = gaussian_attention_input(cfg.n, cfg.p, cfg.stdev, trial_seed.derive(0));
        const DenseMatrix exact = exact_attention(input);
        for (std::size_t mi = 0; mi < methods; ++mi) {
          for (std::size_t di = 0; di < widths; ++di) {
            const std::size_t d = cfg.d_values[di];
            const auto start = std::chrono::steady_clock::now();
            const MethodOutput out = run_method(cfg.methods[mi], input, d, trial_seed.derive(1 + d), cfg.oracle_cap);
            const auto stop = std::chrono::steady_clock::now();
            BenchRow& row = slots[(t * methods + mi) * widths + di];
            row.method = cfg.methods[mi];
            row.d = d;
            row.trial = t;
            row.seed = trial_seed.value();
            row.error = error_report(exact, out.output, input.m());
            row.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
            row.score_entries = out.score_entries;
          }
        }
      },
      cfg.threads);

  BenchResult result;
  result.rows.reserve(slots.size());
  const double count = static_cast<double>(cfg.trials);
  for (std::size_t mi = 0; mi < methods; ++mi) {
    for (std::size_t di = 0; di < widths; ++di) {
      BenchAggregate agg;
      agg.method = cfg.methods[mi];
      agg.d = cfg.d_values[di];
      std::array<double, 4> sum{}, sum_sq{};
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const BenchRow& row = slots[(t * methods + mi) * widths + di];
        const std::array<double, 4> x{row.error.spectral_loss, row.error.frobenius_loss,
                                      row.error.relative_spectral, row.error.relative_frobenius};
        for (std::size_t k = 0; k < 4; ++k) {
          sum[k] += x[k];
          sum_sq[k] += x[k] * x[k];
        }
        agg.mean_elapsed_ns += static_cast<double>(row.elapsed_ns);
        agg.mean_score_entries += static_cast<double>(row.score_entries);
        if (!(row.error.spectral_loss >= 0.0) || !(row.error.relative_spectral <= kRelativeSpectralCeiling)) {
          ++result.sanity_violations;
        }
        result.rows.push_back(row);
      }
      std::array<double, 4> mean{}, se{};
      for (std::size_t k = 0; k < 4; ++k) {
        mean[k] = sum[k] / count;
        const double var = cfg.trials > 1 ? std::max(0.0, (sum_sq[k] - count * mean[k] * mean[k]) / (count - 1.0)) : 0.0;
        se[k] = std::sqrt(var / count);
      }
      agg.mean = {mean[0], mean[1], mean[2], mean[3]};
      agg.std_error = {se[0], se[1], se[2], se[3]};
      agg.mean_elapsed_ns /= count;
      agg.mean_score_entries /= count;
      result.aggregates.push_back(agg);
    }
  }
  return result;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw InternalError("format_double: conversion failed");
  return std::string(buf.data(), end);
}

void write_bench_csv(const SweepConfig& cfg, const BenchResult& result, std::ostream& out) {
  if (!cfg.deterministic) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    out << "# skein bench generated " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << '\n';
  }
  out << "method,n,p,d,trial,seed,spectral_loss,frobenius_loss,relative_spectral,relative_frobenius,"
         "elapsed_ns,score_entries_computed,spectral_se,frobenius_se,relative_spectral_se,"
         "relative_frobenius_se\n";
  std::size_t next_row = 0;
  for (const auto& agg : result.aggregates) {
    for (std::size_t t = 0; t < cfg.trials; ++t, ++next_row) {
      const BenchRow& row = result.rows[next_row];
      out << row.method << ',' << cfg.n << ',' << cfg.p << ',' << row.d << ',' << row.trial << ','
          << row.seed << ',' << format_double(row.error.spectral_loss) << ','
          << format_double(row.error.frobenius_loss) << ',' << format_double(row.error.relative_spectral)
          << ',' << format_double(row.error.relative_frobenius) << ','
          << (cfg.deterministic ? 0 : row.elapsed_ns) << ',' << row.score_entries << ",,,,\n";
    }
    out << agg.method << ',' << cfg.n << ',' << cfg.p << ',' << agg.d << ",-1," << cfg.seed.value() << ','
        << format_double(agg.mean.spectral_loss) << ',' << format_double(agg.mean.frobenius_loss) << ','
        << format_double(agg.mean.relative_spectral) << ',' << format_double(agg.mean.relative_frobenius)
        << ',' << (cfg.deterministic ? std::string("0") : format_double(agg.mean_elapsed_ns)) << ','
        << format_double(agg.mean_score_entries) << ',' << format_double(agg.std_error.spectral_loss) << ','
        << format_double(agg.std_error.frobenius_loss) << ',' << format_double(agg.std_error.relative_spectral)
        << ',' << format_double(agg.std_error.relative_frobenius) << '\n';
  }
}

namespace {

std::string seed_text(RngSeed seed) {
  return std::to_string(seed.master_seed) + (seed.stream_id ? ":" + std::to_string(seed.stream_id) : "");
}

VerifyOutcome verify_prop1_report(const VerifyParams& params) {
  Prop1Config cfg;
  cfg.n = params.n;
  cfg.p = params.p;
  cfg.d = params.d;
  cfg.delta = params.delta;
  cfg.trials = params.trials;
  cfg.seed = params.seed;
  cfg.stdev = params.stdev;
  cfg.flatten = params.flatten;
  const auto r = verify_prop1(cfg);
  std::ostringstream os;
  os << "prop1: n=" << cfg.n << " p=" << cfg.p << " d=" << cfg.d << " delta=" << cfg.delta
     << " flatten=" << cfg.flatten << " min_beta=" << r.min_beta << '\n'
     << "  violations " << r.violations << " / " << r.trials << ", rate " << r.violation_rate
     << ", tolerance " << r.tolerance << '\n'
     << "  mean squared Frobenius error " << r.mean_sq_error << " (se " << r.se_sq_error << "), mean bound "
     << r.mean_bound << '\n'
     << "  trials " << r.trials << ", seed " << seed_text(cfg.seed) << '\n'
     << (r.passed ? "PASS" : "FAIL") << '\n';
  return {r.passed, os.str()};
}

VerifyOutcome verify_lemma1_report(const VerifyParams& params) {
  Lemma1Config cfg;
  cfg.n = params.n;
  cfg.p = params.p;
  cfg.delta = params.delta;
  cfg.trials = params.trials;
  cfg.seed = params.seed;
  cfg.stdev = params.stdev;
  const auto r = verify_lemma1(cfg);
  std::ostringstream os;
  os << "lemma1: n=" << cfg.n << " p=" << cfg.p << " delta=" << cfg.delta << '\n'
     << "  failures " << r.failures << " / " << r.trials << ", rate " << r.failure_rate << ", tolerance "
     << r.tolerance << '\n'
     << "  pilot size: mean required " << r.mean_required_pilot << ", used " << r.min_pilot << ".."
     << r.max_pilot << ", above m in " << r.oversized_trials << " trials, clipped to 2^53 in " << r.capped_trials << " trials (" << r.capped_failures
     << " of them failed)\n"
     << "  smallest p_hat/p ratio " << r.min_ratio << " (threshold " << std::sqrt(1.0 / 3.0) << ")\n"
     << "  trials " << r.trials << ", seed " << seed_text(cfg.seed) << '\n'
     << (r.passed ? "PASS" : "FAIL") << '\n';
  return {r.passed, os.str()};
}

VerifyOutcome verify_sketch_report(const VerifyParams& params) {
  SketchSpec spec;
  spec.width = params.d;
  spec.seed = params.seed;
  if (params.sketch == "gaussian") {
    spec.kind = SketchKind::gaussian;
    spec.rows = params.n;
  } else if (params.sketch == "subsample") {
    spec.kind = SketchKind::subsample_with_replacement;
    spec.probs.assign(params.n, 1.0 / static_cast<double>(params.n));
  } else {
    throw InvalidArgument("sketch must be 'gaussian' or 'subsample'");
  }
  if (params.n < 1) throw InvalidArgument("n must be positive");
  constexpr double kZ = 5.0;
  const auto r = verify_sketch_unbiased(spec, params.trials);
  const bool ok = r.passed(kZ);
  std::ostringstream os;
  os << "sketch_unbiased: " << params.sketch << " n=" << params.n << " d=" << params.d << '\n'
     << "  max |mean(SS^T) - I| " << r.max_abs_deviation << ", max z " << r.max_z << ", tolerance " << kZ
     << " standard errors" << (r.exact_entries_ok ? "" : ", zero-variance entry off target") << '\n'
     << "  trials " << r.trials << ", seed " << seed_text(params.seed) << '\n'
     << (ok ? "PASS" : "FAIL") << '\n';
  return {ok, os.str()};
}

VerifyOutcome verify_jl_report(const VerifyParams& params) {
  if (!(params.delta > 0.0 && params.delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
  const double rate = jl_distortion_check(params.n, params.d, params.epsilon, params.trials, params.seed);
  const double tolerance = binomial_tolerance(params.delta, params.trials);
  const bool ok = rate <= tolerance;
  std::ostringstream os;
  os << "jl: n=" << params.n << " d=" << params.d << " epsilon=" << params.epsilon << " delta=" << params.delta
     << '\n'
     << "  failure rate " << rate << ", tolerance " << tolerance << '\n'
     << "  trials " << params.trials << ", seed " << seed_text(params.seed) << '\n'
     << (ok ? "PASS" : "FAIL") << '\n';
  return {ok, os.str()};
}

}  // namespace

VerifyOutcome run_verify(VerifyKind kind, const VerifyParams& params) {
  switch (kind) {
    case VerifyKind::prop1: return verify_prop1_report(params);
    case VerifyKind::lemma1: return verify_lemma1_report(params);
    case VerifyKind::sketch_unbiased: return verify_sketch_report(params);
    case VerifyKind::jl: return verify_jl_report(params);
  }
  throw InvalidArgument("unknown verification kind");
}

void write_flops_table(std::uint64_t n, std::uint64_t p, std::uint64_t d, std::ostream& out) {
  if (n == 0 || p == 0 || d == 0) throw InvalidArgument("n, p and d must be positive");
  out << "leading-term FLOPs for n=" << n << " p=" << p << " d=" << d << '\n';
  out << std::left << std::setw(14) << "method" << std::setw(10) << "formula" << "flops\n";
  for (std::string_view method : flops_methods()) {
    out << std::left << std::setw(14) << method << std::setw(10) << flops_formula(method)
        << flops_estimate(method, n, p, d) << '\n';
  }
}

}  // namespace skein
