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

#include "data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "common/rng.hpp"

namespace biofed::data {

namespace {

std::string class_name(std::size_t k, std::size_t num_classes) {
  const int width = num_classes > 100 ? 3 : 2;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "species-%0*zu", width, k);
  return buf;
}

}  // namespace

Dataset synthesize(const SyntheticSpec& spec) {
  if (spec.num_classes == 0 || spec.samples_per_class == 0) {
    throw Error(ErrorCode::kValidation, "synthetic dataset needs positive class and sample counts");
  }
  if (spec.image_shape.size() != 3 || spec.image_shape[0] == 0 || spec.image_shape[1] == 0 ||
      spec.image_shape[2] == 0) {
    throw Error(ErrorCode::kValidation, "synthetic image_shape must be positive [C, H, W]");
  }
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) {
    throw Error(ErrorCode::kValidation, "synthetic noise must be finite and >= 0");
  }
  const std::size_t channels = spec.image_shape[0], height = spec.image_shape[1], width = spec.image_shape[2];
  const std::size_t orientations = std::min<std::size_t>(spec.num_classes, 12);
  constexpr double kPi = std::numbers::pi;

  DatasetManifest m;
  m.image_shape = spec.image_shape;
  m.sites = default_sites();
  for (std::size_t k = 0; k < spec.num_classes; ++k) m.classes.push_back(class_name(k, spec.num_classes));

  std::vector<nn::Tensor> raw;
  raw.reserve(spec.num_classes * spec.samples_per_class);
  for (std::size_t k = 0; k < spec.num_classes; ++k) {
    const std::size_t band = k / orientations;
    const double theta = kPi * (static_cast<double>(k % orientations) + 0.5 * static_cast<double>(band % 2)) /
                         static_cast<double>(orientations);
    const double cycles = 1.5 + 1.25 * static_cast<double>(band);
    const double base_phase = 2.0 * kPi * std::fmod(static_cast<double>(k) * 0.6180339887498949, 1.0);
    const double kx = 2.0 * kPi * cycles * std::cos(theta) / static_cast<double>(width);
    const double ky = 2.0 * kPi * cycles * std::sin(theta) / static_cast<double>(height);
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      Sample s;
      s.ref = "synthetic/" + std::to_string(k) + "/" + std::to_string(i);
      s.label = static_cast<std::uint32_t>(k);
      s.site = m.sites[(k * spec.samples_per_class + i) % m.sites.size()];
      m.samples.push_back(s);

      Rng rng(derive_seed(derive_seed(spec.seed, "synthetic"), s.ref));
      const double phase = base_phase + spec.noise * kPi * rng.uniform(-1.0, 1.0);
      std::vector<float> values(channels * height * width);
      for (std::size_t c = 0; c < channels; ++c) {
        const double gain = 0.4 * (1.0 - 0.15 * static_cast<double>(c));
        for (std::size_t r = 0; r < height; ++r) {
          for (std::size_t q = 0; q < width; ++q) {
            double v = 0.5 + gain * std::cos(kx * static_cast<double>(q) + ky * static_cast<double>(r) + phase);
            if (spec.noise > 0.0) v += 0.5 * spec.noise * rng.normal();
            values[(c * height + r) * width + q] = static_cast<float>(std::clamp(v, 0.0, 1.0));
          }
        }
      }
      raw.emplace_back(spec.image_shape, std::move(values));
    }
  }
  assign_split(m, spec.seed, spec.test_fraction);
  return build_dataset(std::move(m), std::move(raw));
}

}  // namespace biofed::data
