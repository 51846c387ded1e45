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

#include "nn/checkpoint.hpp"

#include <algorithm>
#include <cmath>

namespace biofed::nn {

namespace {

constexpr std::size_t kMaxRank = 8;

}  // namespace

void encode_checkpoint(const ModelParameters& params, ByteWriter& out) {
  for (std::uint8_t b : kCheckpointMagic) out.u8(b);
  out.u16(kCheckpointVersion);
  out.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& e : params) {
    append_schema_preamble(out, e.name, e.tensor.shape());
    for (float v : e.tensor.values()) out.f32(v);
  }
}

Bytes encode_checkpoint(const ModelParameters& params) {
  ByteWriter w;
  encode_checkpoint(params, w);
  return w.take();
}

ModelParameters decode_checkpoint(ByteReader& reader) {
  ByteSpan magic = reader.raw(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kCheckpointMagic))) {
    throw Error(ErrorCode::kMalformedPayload, "bad checkpoint magic");
  }
  const std::uint16_t version = reader.u16();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kMalformedPayload, "unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t count = reader.u32();
  ModelParameters params;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = reader.str16();
    const std::size_t rank = reader.u8();
    if (rank == 0 || rank > kMaxRank) {
      throw Error(ErrorCode::kMalformedPayload, "invalid rank for " + name);
    }
    Shape shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = reader.u32();
      if (d == 0) throw Error(ErrorCode::kMalformedPayload, "zero dimension in " + name);
      // Each value needs 4 bytes; bounding the running product by remaining/4
      // also keeps it from overflowing.
      if (d > reader.remaining() / 4 / n) {
        throw Error(reader.underflow_code(), "tensor " + name + " larger than remaining input");
      }
      n *= d;
    }
    if (n > reader.remaining() / 4) {
      throw Error(reader.underflow_code(), "tensor " + name + " larger than remaining input");
    }
    std::vector<float> values(n);
    for (auto& v : values) {
      v = reader.f32();
      if (!std::isfinite(v)) throw Error(ErrorCode::kMalformedPayload, "non-finite value in " + name);
    }
    if (params.find(name) != nullptr) {
      throw Error(ErrorCode::kMalformedPayload, "duplicate parameter name " + name);
    }
    params.add(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  return params;
}

ModelParameters decode_checkpoint(ByteSpan data) {
  ByteReader reader(data, ErrorCode::kMalformedPayload);
  ModelParameters params = decode_checkpoint(reader);
  if (!reader.done()) throw Error(ErrorCode::kMalformedPayload, "trailing bytes after checkpoint");
  return params;
}

void save_checkpoint(const std::string& path, const ModelParameters& params) {
  write_file_bytes(path, encode_checkpoint(params));
}

ModelParameters load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file_bytes(path));
}

}  // namespace biofed::nn
