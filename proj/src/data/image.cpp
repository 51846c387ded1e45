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

#include "data/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "nn/checkpoint.hpp"

namespace biofed::data {

namespace {

class PnmHeaderParser {
 public:
  explicit PnmHeaderParser(ByteSpan bytes) : bytes_(bytes) {}

  std::size_t next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::kCorruptImage, "expected a number in PNM header");
    }
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000) throw Error(ErrorCode::kCorruptImage, "PNM header value too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::kCorruptImage, "missing whitespace before PNM raster");
    }
    return pos_ + 1;
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  ByteSpan bytes_;
  std::size_t pos_ = 0;
};

RawImage decode_pnm(ByteSpan bytes, std::size_t channels) {
  PnmHeaderParser p(bytes);
  p.skip(2);
  const std::size_t width = p.next_number();
  const std::size_t height = p.next_number();
  const std::size_t maxval = p.next_number();
  if (width == 0 || height == 0) throw Error(ErrorCode::kCorruptImage, "zero image dimension");
  if (maxval == 0 || maxval > 65535) throw Error(ErrorCode::kCorruptImage, "maxval out of range");
  const std::size_t start = p.raster_start();
  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t need = width * height * channels * bps;
  if (bytes.size() < start || bytes.size() - start < need) {
    throw Error(ErrorCode::kCorruptImage, "PNM raster truncated");
  }
  RawImage img{channels, height, width, std::vector<float>(channels * height * width)};
  const std::uint8_t* src = bytes.data() + start;
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t px = 0; px < width * height; ++px) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t off = (px * channels + c) * bps;
      const std::size_t v = bps == 2 ? (static_cast<std::size_t>(src[off]) << 8) | src[off + 1] : src[off];
      if (v > maxval) throw Error(ErrorCode::kCorruptImage, "sample exceeds maxval");
      img.values[c * width * height + px] = static_cast<float>(static_cast<double>(v) * scale);
    }
  }
  return img;
}

RawImage decode_sidecar(ByteSpan bytes) {
  nn::ModelParameters params;
  try {
    params = nn::decode_checkpoint(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptImage, std::string("raw-tensor sidecar: ") + e.what());
  }
  if (params.size() != 1 || params.entry(0).tensor.rank() != 3) {
    throw Error(ErrorCode::kCorruptImage, "raw-tensor sidecar must hold exactly one CxHxW tensor");
  }
  const nn::Tensor& t = params.entry(0).tensor;
  for (float v : t.values()) {
    if (v < 0.0f || v > 1.0f) throw Error(ErrorCode::kCorruptImage, "raw-tensor sidecar values outside [0, 1]");
  }
  return RawImage{t.dim(0), t.dim(1), t.dim(2), std::vector<float>(t.values().begin(), t.values().end())};
}

Bytes encode_pnm(const char* magic, std::size_t width, std::size_t height, const std::vector<std::uint8_t>& raster) {
  const std::string header = std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

}  // namespace

RawImage decode_image(ByteSpan bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pnm(bytes, 1);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_pnm(bytes, 3);
  if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, std::begin(nn::kCheckpointMagic))) {
    return decode_sidecar(bytes);
  }
  throw Error(ErrorCode::kUnsupportedFormat, "expected binary PGM (P5), PPM (P6) or a BFCK raw tensor");
}

Bytes encode_pgm(std::size_t width, std::size_t height, const std::vector<std::uint8_t>& gray) {
  if (gray.size() != width * height) throw Error(ErrorCode::kInvalidArgument, "PGM raster size mismatch");
  return encode_pnm("P5", width, height, gray);
}

Bytes encode_ppm(std::size_t width, std::size_t height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != 3 * width * height) throw Error(ErrorCode::kInvalidArgument, "PPM raster size mismatch");
  return encode_pnm("P6", width, height, rgb);
}

RawImage resize_nearest(const RawImage& image, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw Error(ErrorCode::kInvalidArgument, "resize target must be positive");
  if (image.height == height && image.width == width) return image;
  RawImage out{image.channels, height, width, std::vector<float>(image.channels * height * width)};
  for (std::size_t c = 0; c < image.channels; ++c) {
    for (std::size_t r = 0; r < height; ++r) {
      const std::size_t sr = r * image.height / height;
      for (std::size_t q = 0; q < width; ++q) {
        const std::size_t sq = q * image.width / width;
        out.values[(c * height + r) * width + q] = image.values[(c * image.height + sr) * image.width + sq];
      }
    }
  }
  return out;
}

RawImage convert_channels(const RawImage& image, std::size_t channels) {
  if (image.channels == channels) return image;
  const std::size_t plane = image.height * image.width;
  RawImage out{channels, image.height, image.width, std::vector<float>(channels * plane)};
  if (image.channels == 1 && channels == 3) {
    for (std::size_t c = 0; c < 3; ++c) std::copy(image.values.begin(), image.values.end(), out.values.begin() + c * plane);
  } else if (image.channels == 3 && channels == 1) {
    for (std::size_t i = 0; i < plane; ++i) {
      const double sum = static_cast<double>(image.values[i]) + image.values[plane + i] + image.values[2 * plane + i];
      out.values[i] = static_cast<float>(sum / 3.0);
    }
  } else {
    throw Error(ErrorCode::kUnsupportedFormat, "cannot convert " + std::to_string(image.channels) + " channels to " +
                                                   std::to_string(channels));
  }
  return out;
}

nn::Tensor preprocess(const RawImage& image, const nn::Shape& target, const Normalization& norm) {
  if (target.size() != 3) throw Error(ErrorCode::kInvalidArgument, "target shape must be CxHxW");
  const std::size_t channels = target[0];
  if (norm.mean.size() != channels || norm.stddev.size() != channels) {
    throw Error(ErrorCode::kInvalidArgument, "normalization constants do not match channel count");
  }
  if (image.values.size() != image.channels * image.height * image.width || image.values.empty()) {
    throw Error(ErrorCode::kCorruptImage, "image buffer does not match its dimensions");
  }
  RawImage img = convert_channels(resize_nearest(image, target[1], target[2]), channels);
  const std::size_t plane = target[1] * target[2];
  std::vector<float> values(img.values.size());
  for (std::size_t c = 0; c < channels; ++c) {
    const double sd = norm.stddev[c];
    if (!(sd > 0.0)) throw Error(ErrorCode::kInvalidArgument, "normalization stddev must be positive");
    for (std::size_t i = 0; i < plane; ++i) {
      values[c * plane + i] = static_cast<float>((static_cast<double>(img.values[c * plane + i]) - norm.mean[c]) / sd);
    }
  }
  return nn::Tensor(target, std::move(values));
}

nn::Tensor preprocess(ByteSpan image_bytes, const nn::Shape& target, const Normalization& norm) {
  return preprocess(decode_image(image_bytes), target, norm);
}

}  // namespace biofed::data
