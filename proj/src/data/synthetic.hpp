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

#ifndef BIOFED_DATA_SYNTHETIC_HPP_
#define BIOFED_DATA_SYNTHETIC_HPP_

#include <cstdint>

#include "data/dataset.hpp"

namespace biofed::data {

struct SyntheticSpec {
  std::size_t num_classes = 5;
  std::size_t samples_per_class = 40;
  nn::Shape image_shape{1, 16, 16};
  std::uint64_t seed = 0;
  // Scales both the per-pixel Gaussian noise and the per-sample phase jitter.
  // Zero makes every sample of a class identical.
  double noise = 0.2;
  double test_fraction = 0.2;
};

// Oriented sinusoidal gratings: each class owns an (orientation, frequency,
// phase) triple; samples add seed-derived jitter and noise. Sample refs are
// "synthetic/<class>/<index>" and sites cycle through default_sites().
Dataset synthesize(const SyntheticSpec& spec);

}  // namespace biofed::data

#endif  // BIOFED_DATA_SYNTHETIC_HPP_
