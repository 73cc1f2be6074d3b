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

#include "skein/matf.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace skein {

namespace {

constexpr char kMagic[4] = {'M', 'A', 'T', 'F'};

template <typename UInt>
void put_le(std::vector<std::byte>& out, UInt value) {
  for (std::size_t b = 0; b < sizeof(UInt); ++b) {
    out.push_back(static_cast<std::byte>((value >> (8 * b)) & 0xFF));
  }
}

template <typename UInt>
UInt get_le(std::span<const std::byte> bytes, std::size_t offset) {
  UInt value = 0;
  for (std::size_t b = 0; b < sizeof(UInt); ++b) {
    value |= static_cast<UInt>(std::to_integer<unsigned>(bytes[offset + b])) << (8 * b);
  }
  return value;
}

}  // namespace

std::vector<std::byte> encode_matrix(const DenseMatrix& m) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (m.rows() > kMax || m.cols() > kMax) {
    throw InvalidArgument("encode_matrix: dimension exceeds u32 range");
  }
  std::vector<std::byte> out;
  out.reserve(kMatfHeaderBytes + 8 * m.size());
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_le(out, static_cast<std::uint32_t>(m.rows()));
  put_le(out, static_cast<std::uint32_t>(m.cols()));
  for (double x : m.data()) put_le(out, std::bit_cast<std::uint64_t>(x));
  return out;
}

DenseMatrix decode_matrix(std::span<const std::byte> bytes) {
  if (bytes.size() < 4) throw FormatError("MATF: truncated magic", bytes.size());
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<std::byte>(kMagic[i])) throw FormatError("MATF: bad magic", i);
  }
  if (bytes.size() < kMatfHeaderBytes) throw FormatError("MATF: truncated header", bytes.size());
  const std::uint64_t rows = get_le<std::uint32_t>(bytes, 4);
  const std::uint64_t cols = get_le<std::uint32_t>(bytes, 8);
  const std::uint64_t expected = kMatfHeaderBytes + 8 * rows * cols;
  if (bytes.size() < expected) throw FormatError("MATF: truncated payload", bytes.size());
  if (bytes.size() > expected) throw FormatError("MATF: trailing bytes after payload", expected);

  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t offset = kMatfHeaderBytes + 8 * i;
    data[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, offset));
    if (!std::isfinite(data[i])) throw FormatError("MATF: non-finite entry", offset);
  }
  return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_matrix(std::as_bytes(std::span<const char>(raw)));
}

void write_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  const auto bytes = encode_matrix(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace skein
