// Copyright 2026 The CAFS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cafs::npy {

// Element types accepted at the interchange boundary. Everything is
// little-endian, C-order.
enum class Dtype { kFloat32, kFloat64, kUInt8, kUInt16 };

std::size_t item_size(Dtype dtype);
std::string_view descr(Dtype dtype);

struct Header {
  Dtype dtype = Dtype::kFloat32;
  std::vector<std::size_t> shape;

  std::size_t element_count() const;
};

struct Array {
  Header header;
  std::vector<std::byte> payload;
};

// Full NPY v1.0 preamble: magic, version, header length, padded dict.
// The returned string's length is a multiple of 64.
std::string encode_header(const Header& header);

// Parses the preamble at the start of `bytes`. On success `data_offset`
// receives the payload start.
Header decode_header(std::string_view bytes, std::size_t& data_offset);

Array read(const std::filesystem::path& path);

void write(const std::filesystem::path& path, const Header& header,
           std::span<const std::byte> payload);

}  // namespace cafs::npy
