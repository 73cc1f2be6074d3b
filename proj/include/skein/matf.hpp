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
#include <filesystem>
#include <span>
#include <vector>

#include "skein/core.hpp"

namespace skein {

// MATF layout: "MATF" | rows u32 LE | cols u32 LE | rows*cols float64 LE, row-major.
inline constexpr std::size_t kMatfHeaderBytes = 12;

std::vector<std::byte> encode_matrix(const DenseMatrix& m);
/// Throws FormatError carrying the offending byte offset.
DenseMatrix decode_matrix(std::span<const std::byte> bytes);

DenseMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const DenseMatrix& m);

}  // namespace skein
