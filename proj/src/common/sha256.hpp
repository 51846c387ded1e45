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

#ifndef BIOFED_COMMON_SHA256_HPP_
#define BIOFED_COMMON_SHA256_HPP_

#include <array>
#include <cstdint>
#include <string>

#include "common/bytes.hpp"

namespace biofed {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteSpan data);
std::string to_hex(const Digest& digest);

}  // namespace biofed

#endif  // BIOFED_COMMON_SHA256_HPP_
