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

#include "cafs/npy.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "cafs/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are copied verbatim; big-endian hosts need a byteswap path");

namespace cafs::npy {
namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kPreambleSize = 10;  // magic + version + u16 length
constexpr std::size_t kAlignment = 64;

[[noreturn]] void malformed(const std::string& what) { fail(ErrorKind::kMalformedHeader, what); }

// Minimal reader for the Python-literal dict numpy writes, e.g.
// {'descr': '<f4', 'fortran_order': False, 'shape': (2, 3), }
class DictParser {
 public:
  explicit DictParser(std::string_view text) : text_(text) {}

  Header parse() {
    std::optional<std::string> descr_value;
    std::optional<bool> fortran;
    std::optional<std::vector<std::size_t>> shape;

    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const std::string key = parse_string();
      expect(':');
      skip_ws();
      if (key == "descr") {
        descr_value = parse_string();
      } else if (key == "fortran_order") {
        fortran = parse_bool();
      } else if (key == "shape") {
        shape = parse_tuple();
      } else {
        malformed("unexpected header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        malformed("expected ',' or '}' in header dict");
      }
    }
    skip_ws();
    if (pos_ != text_.size()) malformed("trailing bytes after header dict");

    if (!descr_value || !fortran || !shape) {
      malformed("header dict must contain descr, fortran_order and shape");
    }
    if (*fortran) malformed("fortran_order=True is not supported");

    Header header;
    header.shape = std::move(*shape);
    if (*descr_value == "<f4") {
      header.dtype = Dtype::kFloat32;
    } else if (*descr_value == "<f8") {
      header.dtype = Dtype::kFloat64;
    } else if (*descr_value == "|u1" || *descr_value == "<u1") {
      header.dtype = Dtype::kUInt8;
    } else if (*descr_value == "<u2") {
      header.dtype = Dtype::kUInt16;
    } else {
      malformed("unsupported descr '" + *descr_value + "'");
    }
    return header;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) malformed(std::string("expected '") + c + "' in header dict");
    ++pos_;
  }

  std::string parse_string() {
    skip_ws();
    const char quote = peek();
    if (quote != '\'' && quote != '"') malformed("expected quoted string in header dict");
    const std::size_t end = text_.find(quote, pos_ + 1);
    if (end == std::string_view::npos) malformed("unterminated string in header dict");
    std::string out(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return out;
  }

  bool parse_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    malformed("expected True or False for fortran_order");
  }

  std::vector<std::size_t> parse_tuple() {
    std::vector<std::size_t> dims;
    expect('(');
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      std::size_t value = 0;
      const char* first = text_.data() + pos_;
      const char* last = text_.data() + text_.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr == first) malformed("bad dimension in shape tuple");
      pos_ += static_cast<std::size_t>(ptr - first);
      dims.push_back(value);
      skip_ws();
      if (peek() == 'L') ++pos_;  // python2-era long suffix
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ')') {
        malformed("expected ',' or ')' in shape tuple");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t item_size(Dtype dtype) {
  switch (dtype) {
    case Dtype::kFloat32:
      return 4;
    case Dtype::kFloat64:
      return 8;
    case Dtype::kUInt8:
      return 1;
    case Dtype::kUInt16:
      return 2;
  }
  return 0;
}

std::string_view descr(Dtype dtype) {
  switch (dtype) {
    case Dtype::kFloat32:
      return "<f4";
    case Dtype::kFloat64:
      return "<f8";
    case Dtype::kUInt8:
      return "|u1";
    case Dtype::kUInt16:
      return "<u2";
  }
  return "";
}

std::size_t Header::element_count() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string encode_header(const Header& header) {
  std::string dict = "{'descr': '";
  dict += descr(header.dtype);
  dict += "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < header.shape.size(); ++i) {
    dict += std::to_string(header.shape[i]);
    if (header.shape.size() == 1 || i + 1 < header.shape.size()) dict += ",";
    if (i + 1 < header.shape.size()) dict += " ";
  }
  dict += "), }";

  // Pad with spaces so that preamble + dict + '\n' lands on a 64-byte boundary.
  const std::size_t unpadded = kPreambleSize + dict.size() + 1;
  const std::size_t total = (unpadded + kAlignment - 1) / kAlignment * kAlignment;
  dict.append(total - unpadded, ' ');
  dict.push_back('\n');

  const std::size_t header_len = dict.size();
  if (header_len > 0xFFFF) fail(ErrorKind::kMalformedHeader, "header too long for NPY v1.0");

  std::string out(kMagic);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(header_len & 0xFF));
  out.push_back(static_cast<char>((header_len >> 8) & 0xFF));
  out += dict;
  return out;
}

Header decode_header(std::string_view bytes, std::size_t& data_offset) {
  if (bytes.size() < kPreambleSize || bytes.substr(0, kMagic.size()) != kMagic) {
    malformed("missing NPY magic");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0) {
    malformed("unsupported NPY version " + std::to_string(major) + "." + std::to_string(minor));
  }
  const std::size_t header_len =
      static_cast<unsigned char>(bytes[8]) |
      (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < kPreambleSize + header_len) malformed("truncated header");

  std::string_view dict = bytes.substr(kPreambleSize, header_len);
  if (dict.empty() || dict.back() != '\n') malformed("header must end in a newline");
  dict.remove_suffix(1);
  Header header = DictParser(dict).parse();
  data_offset = kPreambleSize + header_len;
  return header;
}

Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::kIo, "read failed for " + path.string());

  std::size_t offset = 0;
  Array array;
  try {
    array.header = decode_header(bytes, offset);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(e.what()) + " (" + path.string() + ")");
  }
  const std::size_t expected = array.header.element_count() * item_size(array.header.dtype);
  if (bytes.size() - offset != expected) {
    malformed("payload size " + std::to_string(bytes.size() - offset) + " does not match shape (" +
              std::to_string(expected) + " bytes expected) in " + path.string());
  }
  array.payload.resize(expected);
  std::memcpy(array.payload.data(), bytes.data() + offset, expected);
  return array;
}

void write(const std::filesystem::path& path, const Header& header,
           std::span<const std::byte> payload) {
  if (payload.size() != header.element_count() * item_size(header.dtype)) {
    fail(ErrorKind::kShape, "payload size does not match header shape");
  }
  const std::string preamble = encode_header(header);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(preamble.data(), static_cast<std::streamsize>(preamble.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace cafs::npy
