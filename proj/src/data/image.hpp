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

#ifndef BIOFED_DATA_IMAGE_HPP_
#define BIOFED_DATA_IMAGE_HPP_

#include <cstddef>
#include <vector>

#include "common/bytes.hpp"
#include "nn/tensor.hpp"

namespace biofed::data {

// Decoded image in channel-major (CHW) order, values scaled to [0, 1].
struct RawImage {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;

  nn::Shape shape() const { return {channels, height, width}; }
};

struct Normalization {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Normalization identity(std::size_t channels) {
    return {std::vector<double>(channels, 0.0), std::vector<double>(channels, 1.0)};
  }
  friend bool operator==(const Normalization&, const Normalization&) = default;
};

// Binary PGM (P5) and PPM (P6) with maxval up to 65535, or a raw-tensor
// sidecar (checkpoint layout holding one CxHxW tensor already in [0, 1]).
// Anything else is kUnsupportedFormat; damaged input is kCorruptImage.
RawImage decode_image(ByteSpan bytes);

// Encoders for fixtures and the synthetic exporter.
Bytes encode_pgm(std::size_t width, std::size_t height, const std::vector<std::uint8_t>& gray);
Bytes encode_ppm(std::size_t width, std::size_t height, const std::vector<std::uint8_t>& rgb);

// Nearest neighbour: destination (r, c) samples source
// (r * src_h / dst_h, c * src_w / dst_w) with integer division.
RawImage resize_nearest(const RawImage& image, std::size_t height, std::size_t width);

// 1 -> 3 replicates the gray plane; 3 -> 1 averages the three planes.
RawImage convert_channels(const RawImage& image, std::size_t channels);

// Resize/convert to target {C, H, W}, then standardize each channel with
// (v - mean[c]) / stddev[c].
nn::Tensor preprocess(const RawImage& image, const nn::Shape& target, const Normalization& norm);
nn::Tensor preprocess(ByteSpan image_bytes, const nn::Shape& target, const Normalization& norm);

}  // namespace biofed::data

#endif  // BIOFED_DATA_IMAGE_HPP_
