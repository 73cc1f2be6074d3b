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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skein/core.hpp"
#include "skein/metrics.hpp"
#include "skein/oracle.hpp"

namespace skein {

/// Methods accepted by `run_method` and the bench sweep. The skeinformer_*
/// entries are ablations: uniform column sampling, simple row normalization,
/// no row normalization, and no pilot-row reuse.
std::span<const std::string_view> registered_methods();
bool is_registered_method(std::string_view name);

struct MethodOutput {
  DenseMatrix output;
  std::uint64_t score_entries = 0;
};

MethodOutput run_method(std::string_view method, const AttentionInput& input, std::size_t d, RngSeed seed,
                        std::size_t oracle_cap = kDefaultOracleCap);

struct SweepConfig {
  std::size_t n = 512;
  std::size_t p = 32;
  std::vector<std::size_t> d_values{8, 16, 32, 64, 128, 256};
  std::vector<std::string> methods{"skeinformer", "informer", "linformer", "vmean"};
  std::size_t trials = 64;
  double stdev = 1.0;
  RngSeed seed;
  bool deterministic = false;
  std::size_t oracle_cap = kDefaultOracleCap;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

/// Throws InvalidArgument naming the first violated constraint.
void validate(const SweepConfig& cfg);

struct BenchRow {
  std::string method;
  std::size_t d = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  ErrorReport error;
  std::int64_t elapsed_ns = 0;
  std::uint64_t score_entries = 0;
};

struct BenchAggregate {
  std::string method;
  std::size_t d = 0;
  ErrorReport mean;
  ErrorReport std_error;
  double mean_elapsed_ns = 0.0;
  double mean_score_entries = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;              // (method, d, trial) order
  std::vector<BenchAggregate> aggregates;  // (method, d) order
  std::size_t sanity_violations = 0;       // rows with negative loss or relative_spectral > 10

  const BenchAggregate& aggregate(std::string_view method, std::size_t d) const;
};

inline constexpr double kRelativeSpectralCeiling = 10.0;

BenchResult run_bench(const SweepConfig& cfg);

/// Writes the CSV. Data rows leave the four *_se columns empty; aggregate rows
/// carry trial = -1. Under `deterministic` the timestamp comment line is
/// skipped and elapsed_ns is written as 0.
void write_bench_csv(const SweepConfig& cfg, const BenchResult& result, std::ostream& out);

enum class VerifyKind { prop1, lemma1, sketch_unbiased, jl };

struct VerifyParams {
  std::size_t n = 64;
  std::size_t p = 8;
  std::size_t d = 16;
  double delta = 0.1;
  double epsilon = 0.25;
  std::size_t trials = 500;
  RngSeed seed;
  double stdev = 1.0;
  double flatten = 0.0;
  std::string sketch = "gaussian";  // sketch_unbiased: gaussian | subsample
};

struct VerifyOutcome {
  bool passed = false;
  std::string report;
};

/// Argument problems surface as InvalidArgument before any work is done.
VerifyOutcome run_verify(VerifyKind kind, const VerifyParams& params);

void write_flops_table(std::uint64_t n, std::uint64_t p, std::uint64_t d, std::ostream& out);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

}  // namespace skein
