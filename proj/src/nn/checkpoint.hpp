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

#ifndef BIOFED_NN_CHECKPOINT_HPP_
#define BIOFED_NN_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "common/bytes.hpp"
#include "nn/params.hpp"

namespace biofed::nn {

inline constexpr std::uint8_t kCheckpointMagic[4] = {'B', 'F', 'C', 'K'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

// Layout, all little-endian:
//   "BFCK" | u16 version | u32 entry count |
//   per entry: u16 name length, name, u8 rank, u32 dims..., f32 values...
void encode_checkpoint(const ModelParameters& params, ByteWriter& out);
Bytes encode_checkpoint(const ModelParameters& params);

// Reads one checkpoint from the reader's current position. Corruption is
// reported with `reader.underflow_code()` for short input and
// kMalformedPayload for anything structurally invalid.
ModelParameters decode_checkpoint(ByteReader& reader);
// Whole-buffer variant: trailing bytes are an error.
ModelParameters decode_checkpoint(ByteSpan data);

void save_checkpoint(const std::string& path, const ModelParameters& params);
ModelParameters load_checkpoint(const std::string& path);

}  // namespace biofed::nn

#endif  // BIOFED_NN_CHECKPOINT_HPP_
