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

// skein: command-line front end for the attention sketching library.
//
// Exit codes: 0 success / PASS, 1 usage, 2 I/O or format, 3 verification FAIL.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "skein/bench.hpp"
#include "skein/core.hpp"
#include "skein/matf.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitFail = 3;

struct GenOptions {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double stdev = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string out;
};

struct AttnOptions {
  std::string method;
  std::string q, k, v, out;
  std::size_t d = 32;
  std::uint64_t seed = 0;
  std::optional<std::size_t> unpadded_len;
  std::size_t oracle_cap = skein::kDefaultOracleCap;
};

struct BenchOptions {
  skein::SweepConfig sweep;
  std::uint64_t seed = 0;
  std::string out = "-";
};

struct VerifyOptions {
  std::string kind;
  std::optional<std::size_t> n, p, d, trials;
  std::optional<double> delta, epsilon;
  std::uint64_t seed = 0;
  double stdev = 1.0;
  double flatten = 0.0;
  std::string sketch = "gaussian";
};

struct FlopsOptions {
  std::uint64_t n = 1024, p = 32, d = 256;
};

int run_gen(const GenOptions& o) {
  const auto m = skein::generate_gaussian_matrix(o.rows, o.cols, o.stdev, skein::RngSeed{o.seed, o.stream});
  skein::write_matrix(o.out, m);
  return kExitOk;
}

int run_attn(const AttnOptions& o) {
  if (!skein::is_registered_method(o.method)) {
    throw skein::InvalidArgument("unknown method '" + o.method + "'");
  }
  skein::AttentionInput input(skein::read_matrix(o.q), skein::read_matrix(o.k), skein::read_matrix(o.v),
                              o.unpadded_len);
  const auto result = skein::run_method(o.method, input, o.d, skein::RngSeed{o.seed, 0}, o.oracle_cap);
  skein::write_matrix(o.out, result.output);
  return kExitOk;
}

int run_bench(BenchOptions o) {
  o.sweep.seed = skein::RngSeed{o.seed, 0};
  skein::validate(o.sweep);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (o.out != "-") {
    file.open(o.out, std::ios::trunc);
    if (!file) throw skein::IoError("cannot open " + o.out + " for writing");
    out = &file;
  }
  const auto result = skein::run_bench(o.sweep);
  skein::write_bench_csv(o.sweep, result, *out);
  out->flush();
  if (!*out) throw skein::IoError("failed writing bench output");
  if (result.sanity_violations > 0) {
    std::cerr << "bench: " << result.sanity_violations
              << " rows broke the sanity ceiling (negative loss or relative_spectral > "
              << skein::kRelativeSpectralCeiling << ")\n";
    return kExitFail;
  }
  return kExitOk;
}

int run_verify(const VerifyOptions& o) {
  skein::VerifyParams params;
  params.seed = skein::RngSeed{o.seed, 0};
  params.stdev = o.stdev;
  params.flatten = o.flatten;
  params.sketch = o.sketch;
  skein::VerifyKind kind;
  if (o.kind == "prop1") {
    kind = skein::VerifyKind::prop1;
    params.n = o.n.value_or(64);
    params.p = o.p.value_or(8);
    params.d = o.d.value_or(16);
    params.delta = o.delta.value_or(0.1);
    params.trials = o.trials.value_or(500);
    if (!(params.delta > 0.0 && params.delta < 1.0)) {
      throw skein::InvalidArgument("delta must lie in (0, 1) for prop1");
    }
  } else if (o.kind == "lemma1") {
    kind = skein::VerifyKind::lemma1;
    params.n = o.n.value_or(128);
    params.p = o.p.value_or(8);
    params.delta = o.delta.value_or(0.2);
    params.trials = o.trials.value_or(200);
    if (!(params.delta > 0.0 && params.delta < 0.5)) {
      throw skein::InvalidArgument("delta must lie in (0, 1/2) for lemma1");
    }
  } else if (o.kind == "sketch_unbiased") {
    kind = skein::VerifyKind::sketch_unbiased;
    params.n = o.n.value_or(8);
    params.d = o.d.value_or(4);
    params.trials = o.trials.value_or(100000);
  } else {
    kind = skein::VerifyKind::jl;
    params.n = o.n.value_or(64);
    params.epsilon = o.epsilon.value_or(0.5);
    params.delta = o.delta.value_or(0.1);
    if (!(params.epsilon > 0.0 && params.epsilon <= 0.5)) {
      throw skein::InvalidArgument("epsilon must lie in (0, 1/2]");
    }
    if (!(params.delta > 0.0 && params.delta < 0.5)) {
      throw skein::InvalidArgument("delta must lie in (0, 1/2)");
    }
    params.d = o.d.value_or(static_cast<std::size_t>(
        std::ceil(8.0 / (params.epsilon * params.epsilon) * std::log(1.0 / params.delta))));
    params.trials = o.trials.value_or(10000);
  }
  const auto outcome = skein::run_verify(kind, params);
  std::cout << outcome.report;
  return outcome.passed ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and sketched softmax attention: generation, error sweeps, bound checks"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a Gaussian matrix in MATF format");
  gen_cmd->add_option("--n", gen.rows, "Rows")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--p", gen.cols, "Columns")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--stdev", gen.stdev, "Entry standard deviation")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--stream", gen.stream, "Stream id (use distinct ids for Q, K, V)");
  gen_cmd->add_option("--out", gen.out, "Output MATF path")->required();

  AttnOptions attn;
  auto* attn_cmd = app.add_subcommand("attn", "Apply one attention method to MATF inputs");
  attn_cmd->add_option("--method", attn.method, "Method name")->required();
  attn_cmd->add_option("--q", attn.q, "Query matrix")->required();
  attn_cmd->add_option("--k", attn.k, "Key matrix")->required();
  attn_cmd->add_option("--v", attn.v, "Value matrix")->required();
  attn_cmd->add_option("--d", attn.d, "Sample / projection size")->check(CLI::PositiveNumber);
  attn_cmd->add_option("--seed", attn.seed, "Seed");
  attn_cmd->add_option("--unpadded-len", attn.unpadded_len, "Number of leading unpadded rows");
  attn_cmd->add_option("--oracle-cap", attn.oracle_cap, "Largest n for O(n^2) methods");
  attn_cmd->add_option("--out", attn.out, "Output MATF path")->required();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Spectral-norm error sweep over d, written as CSV");
  bench_cmd->add_option("--n", bench.sweep.n, "Sequence length")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--p", bench.sweep.p, "Head dimension")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--d", bench.sweep.d_values, "Comma-separated d values")->delimiter(',');
  bench_cmd->add_option("--methods", bench.sweep.methods, "Comma-separated method names")->delimiter(',');
  bench_cmd->add_option("--trials", bench.sweep.trials, "Trials per (method, d)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--stdev", bench.sweep.stdev, "Stdev of synthetic Q, K, V")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Master seed");
  bench_cmd->add_option("--out", bench.out, "CSV path, '-' for stdout");
  bench_cmd->add_option("--oracle-cap", bench.sweep.oracle_cap, "Largest n for the exact oracle");
  bench_cmd->add_option("--threads", bench.sweep.threads, "Worker threads, 0 = all cores");
  bench_cmd->add_flag("--deterministic", bench.sweep.deterministic,
                      "Omit the timestamp line and wall-clock timings");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo check of a sketching guarantee");
  verify_cmd->add_option("kind", verify.kind, "prop1 | lemma1 | sketch_unbiased | jl")
      ->required()
      ->check(CLI::IsMember({"prop1", "lemma1", "sketch_unbiased", "jl"}));
  verify_cmd->add_option("--n", verify.n, "Sequence length / sketch rows");
  verify_cmd->add_option("--p", verify.p, "Head dimension");
  verify_cmd->add_option("--d", verify.d, "Sample size / sketch width");
  verify_cmd->add_option("--delta", verify.delta, "Failure probability");
  verify_cmd->add_option("--epsilon", verify.epsilon, "JL distortion");
  verify_cmd->add_option("--trials", verify.trials, "Monte Carlo trials");
  verify_cmd->add_option("--seed", verify.seed, "Master seed");
  verify_cmd->add_option("--stdev", verify.stdev, "Stdev of synthetic inputs");
  verify_cmd->add_option("--flatten", verify.flatten, "prop1: mix optimal probabilities toward uniform");
  verify_cmd->add_option("--sketch", verify.sketch, "sketch_unbiased: gaussian | subsample");

  FlopsOptions flops;
  auto* flops_cmd = app.add_subcommand("flops", "Leading-term FLOP counts per method");
  flops_cmd->add_option("--n", flops.n, "Sequence length")->check(CLI::PositiveNumber);
  flops_cmd->add_option("--p", flops.p, "Head dimension")->check(CLI::PositiveNumber);
  flops_cmd->add_option("--d", flops.d, "Sample / projection size")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*attn_cmd) return run_attn(attn);
    if (*bench_cmd) return run_bench(bench);
    if (*verify_cmd) return run_verify(verify);
    if (*flops_cmd) {
      skein::write_flops_table(flops.n, flops.p, flops.d, std::cout);
      return kExitOk;
    }
  } catch (const skein::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitIo;
  } catch (const skein::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const skein::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const skein::ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
