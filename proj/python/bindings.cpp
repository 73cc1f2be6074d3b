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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>

#include "skein/baselines.hpp"
#include "skein/core.hpp"
#include "skein/metrics.hpp"
#include "skein/oracle.hpp"
#include "skein/skeinformer.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

skein::DenseMatrix to_matrix(const Array& a, const char* name) {
  if (a.ndim() != 2) {
    throw skein::InvalidArgument(std::string(name) + " must be a 2-D array");
  }
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<double> data(a.data(), a.data() + rows * cols);
  return skein::DenseMatrix(rows, cols, std::move(data));
}

Array to_array(const skein::DenseMatrix& m) {
  Array out({m.rows(), m.cols()});
  if (m.size() > 0) std::memcpy(out.mutable_data(), m.data().data(), m.size() * sizeof(double));
  return out;
}

skein::AttentionInput make_input(const Array& q, const Array& k, const Array& v,
                                 std::optional<std::size_t> unpadded_len) {
  return skein::AttentionInput(to_matrix(q, "q"), to_matrix(k, "k"), to_matrix(v, "v"), unpadded_len);
}

skein::RowNormMode parse_row_norm(const std::string& s) {
  if (s == "adaptive") return skein::RowNormMode::adaptive;
  if (s == "simple") return skein::RowNormMode::simple;
  if (s == "off") return skein::RowNormMode::off;
  throw skein::InvalidArgument("row_norm must be adaptive, simple or off");
}

skein::SamplingMode parse_sampling(const std::string& s) {
  if (s == "importance") return skein::SamplingMode::importance;
  if (s == "uniform") return skein::SamplingMode::uniform;
  throw skein::InvalidArgument("sampling must be importance or uniform");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact and sketched softmax attention";

  py::register_exception<skein::Error>(m, "SkeinError", PyExc_ValueError);

  m.def(
      "exact_attention",
      [](const Array& q, const Array& k, const Array& v, std::optional<std::size_t> unpadded_len) {
        const auto input = make_input(q, k, v, unpadded_len);
        py::gil_scoped_release release;
        auto out = skein::exact_attention(input);
        py::gil_scoped_acquire acquire;
        return to_array(out);
      },
      py::arg("q"), py::arg("k"), py::arg("v"), py::arg("unpadded_len") = py::none(),
      "softmax(QK^T / sqrt(p)) V with padded keys masked out.");

  m.def(
      "skein_attention",
      [](const Array& q, const Array& k, const Array& v, std::size_t d, std::uint64_t seed,
         std::optional<std::size_t> unpadded_len, const std::string& sampling, const std::string& row_norm,
         bool reuse_pilot) {
        const auto input = make_input(q, k, v, unpadded_len);
        skein::SkeinConfig cfg;
        cfg.d = d;
        cfg.seed = skein::RngSeed{seed, 0};
        cfg.sampling = parse_sampling(sampling);
        cfg.row_norm = parse_row_norm(row_norm);
        cfg.reuse_pilot = reuse_pilot;
        auto result = skein::skein_attention(input, cfg);
        return py::make_tuple(to_array(result.output), result.trace.score_entries);
      },
      py::arg("q"), py::arg("k"), py::arg("v"), py::arg("d"), py::arg("seed") = 0,
      py::arg("unpadded_len") = py::none(), py::arg("sampling") = "importance",
      py::arg("row_norm") = "adaptive", py::arg("reuse_pilot") = true,
      "Sketched attention. Returns (output, computed score entries).");

  m.def(
      "informer_attention",
      [](const Array& q, const Array& k, const Array& v, std::size_t d, std::uint64_t seed,
         std::optional<std::size_t> unpadded_len) {
        return to_array(skein::informer_attention(make_input(q, k, v, unpadded_len), d, skein::RngSeed{seed, 0}));
      },
      py::arg("q"), py::arg("k"), py::arg("v"), py::arg("d"), py::arg("seed") = 0,
      py::arg("unpadded_len") = py::none());

  m.def(
      "linformer_attention",
      [](const Array& q, const Array& k, const Array& v, std::size_t d, std::uint64_t seed,
         std::optional<std::size_t> unpadded_len) {
        return to_array(
            skein::linformer_attention(make_input(q, k, v, unpadded_len), d, skein::RngSeed{seed, 0}));
      },
      py::arg("q"), py::arg("k"), py::arg("v"), py::arg("d"), py::arg("seed") = 0,
      py::arg("unpadded_len") = py::none());

  m.def(
      "vmean_attention",
      [](const Array& q, const Array& k, const Array& v, std::optional<std::size_t> unpadded_len) {
        return to_array(skein::vmean_attention(make_input(q, k, v, unpadded_len)));
      },
      py::arg("q"), py::arg("k"), py::arg("v"), py::arg("unpadded_len") = py::none());

  m.def(
      "spectral_norm",
      [](const Array& a, double tol) { return skein::spectral_norm(to_matrix(a, "a"), tol).value; },
      py::arg("a"), py::arg("tol") = 1e-8);

  m.def(
      "flops_estimate",
      [](const std::string& method, std::uint64_t n, std::uint64_t p, std::uint64_t d) {
        return skein::flops_estimate(method, n, p, d);
      },
      py::arg("method"), py::arg("n"), py::arg("p"), py::arg("d"));
}
