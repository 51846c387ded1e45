// Copyright 2026 The BioFed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIOFED_COMMON_BYTES_HPP_
#define BIOFED_COMMON_BYTES_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common/error.hpp"

namespace biofed {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

// Little-endian serializer.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(Bytes& out) : external_(&out) {}

  void u8(std::uint8_t v) { buf().push_back(v); }
  void u16(std::uint16_t v) { put_le(v, 2); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(ByteSpan data) { buf().insert(buf().end(), data.begin(), data.end()); }

  // u16 length prefix + bytes.
  void str16(std::string_view s);

  Bytes& bytes() { return buf(); }
  Bytes take() { return std::move(buf()); }
  std::size_t size() const { return external_ ? external_->size() : own_.size(); }

 private:
  Bytes& buf() { return external_ ? *external_ : own_; }
  void put_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf().push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  Bytes own_;
  Bytes* external_ = nullptr;
};

// Bounds-checked little-endian reader. Running past the end raises `underflow`.
class ByteReader {
 public:
  ByteReader(ByteSpan data, ErrorCode underflow) : data_(data), underflow_(underflow) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64() { return get_le(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str16();
  ByteSpan raw(std::size_t n);

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == data_.size(); }
  ErrorCode underflow_code() const { return underflow_; }

 private:
  void need(std::size_t n) const;
  std::uint64_t get_le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  ByteSpan data_;
  std::size_t pos_ = 0;
  ErrorCode underflow_;
};

Bytes read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, ByteSpan data);

}  // namespace biofed

#endif  // BIOFED_COMMON_BYTES_HPP_
