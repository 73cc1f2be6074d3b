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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "skein/matf.hpp"

using namespace skein;

namespace {

std::filesystem::path temp_path(const char* name) {
  return std::filesystem::temp_directory_path() / (std::string("skein_test_") + name);
}

std::vector<std::byte> bytes_of(const std::string& s) {
  std::vector<std::byte> out(s.size());
  std::memcpy(out.data(), s.data(), s.size());
  return out;
}

}  // namespace

TEST_CASE("round trip through a file is exact") {
  const auto m = DenseMatrix::from_rows({{1.0, -2.5, 3.0e-300}, {4.0, 0.1, -0.0}});
  const auto path = temp_path("roundtrip.matf");
  write_matrix(path, m);
  const auto back = read_matrix(path);
  CHECK(back == m);
  CHECK(std::signbit(back(1, 2)));
  std::filesystem::remove(path);
}

TEST_CASE("1x1 matrix encodes to 20 bytes with the documented layout") {
  const auto bytes = encode_matrix(DenseMatrix(1, 1, 3.5));
  REQUIRE(bytes.size() == 20);
  CHECK(std::memcmp(bytes.data(), "MATF", 4) == 0);
  const unsigned char rows_le[4] = {1, 0, 0, 0};
  CHECK(std::memcmp(bytes.data() + 4, rows_le, 4) == 0);
  CHECK(std::memcmp(bytes.data() + 8, rows_le, 4) == 0);
  // 3.5 = 0x400C000000000000
  const unsigned char value_le[8] = {0, 0, 0, 0, 0, 0, 0x0C, 0x40};
  CHECK(std::memcmp(bytes.data() + 12, value_le, 8) == 0);
}

TEST_CASE("decode rejects malformed input with offsets") {
  auto good = encode_matrix(DenseMatrix::from_rows({{1.0, 2.0}}));

  auto bad_magic = good;
  std::memcpy(bad_magic.data(), "XXXX", 4);
  try {
    decode_matrix(bad_magic);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }

  CHECK_THROWS_AS(decode_matrix(std::span(good).first(10)), FormatError);
  try {
    decode_matrix(std::span(good).first(good.size() - 3));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() >= kMatfHeaderBytes);
  }

  auto trailing = good;
  trailing.push_back(std::byte{0});
  CHECK_THROWS_AS(decode_matrix(trailing), FormatError);

  auto nonfinite = good;
  const double inf = std::numeric_limits<double>::infinity();
  std::memcpy(nonfinite.data() + 20, &inf, 8);
  try {
    decode_matrix(nonfinite);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 20);
  }

  CHECK_THROWS_AS(decode_matrix(bytes_of("MAT")), FormatError);
}

TEST_CASE("file errors") {
  CHECK_THROWS_AS(read_matrix(temp_path("does_not_exist.matf")), IoError);
  const auto path = temp_path("magic.matf");
  {
    std::ofstream f(path, std::ios::binary);
    f << "XXXX" << std::string(8, '\0');
  }
  CHECK_THROWS_AS(read_matrix(path), FormatError);
  std::filesystem::remove(path);
}
