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

#include "nn/params.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace biofed::nn {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d != 0 && n > std::numeric_limits<std::size_t>::max() / d) {
      throw Error(ErrorCode::kShapeMismatch, "shape size overflows");
    }
    n *= d;
  }
  return shape.empty() ? 0 : n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

void append_schema_preamble(ByteWriter& out, const std::string& name, const Shape& shape) {
  out.str16(name);
  if (shape.size() > std::numeric_limits<std::uint8_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "rank too large for " + name);
  }
  out.u8(static_cast<std::uint8_t>(shape.size()));
  for (std::size_t d : shape) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument, "dimension too large for " + name);
    }
    out.u32(static_cast<std::uint32_t>(d));
  }
}

ModelParameters sgd_step(const ModelParameters& params, const ModelParameters& grads, double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive and finite");
  }
  require_same_schema(params, grads, "sgd_step: gradient schema differs from parameters");
  ModelParameters out = params;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto dst = out.entry(i).tensor.values();
    auto g = grads.entry(i).tensor.values();
    for (std::size_t j = 0; j < dst.size(); ++j) {
      dst[j] = static_cast<float>(static_cast<double>(dst[j]) - lr * static_cast<double>(g[j]));
    }
    if (!out.entry(i).tensor.all_finite()) {
      throw Error(ErrorCode::kNonFinite, "sgd_step produced a non-finite value in " + out.entry(i).name);
    }
  }
  return out;
}

double l2_norm(const ModelParameters& params) {
  double s = 0.0;
  for (const auto& e : params) {
    for (float v : e.tensor.values()) s += static_cast<double>(v) * v;
  }
  return std::sqrt(s);
}

}  // namespace biofed::nn
