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

#ifndef BIOFED_NN_TRAIN_HPP_
#define BIOFED_NN_TRAIN_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "nn/network.hpp"

namespace biofed::nn {

struct TrainConfig {
  double learning_rate = 0.05;
  std::uint32_t batch_size = 16;
  std::uint32_t local_epochs = 1;
  std::uint64_t seed = 0;

  // Throws kValidation listing every violated constraint.
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Flat pixel storage for a labelled set of equally shaped samples.
struct LabeledSamples {
  Shape sample_shape;
  std::vector<float> pixels;
  std::vector<std::uint32_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  std::size_t sample_size() const { return shape_size(sample_shape); }
  std::span<const float> sample(std::size_t i) const {
    return std::span<const float>(pixels).subspan(i * sample_size(), sample_size());
  }
  void append(std::span<const float> values, std::uint32_t label);

  // [indices.size(), sample_shape...] batch in the given order.
  Tensor gather(std::span<const std::size_t> indices) const;
  Tensor all() const;
};

// Fisher-Yates permutation of [0, n) seeded by (seed, global epoch). The
// order depends only on those two values, never on earlier epochs.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::uint64_t global_epoch);

struct LocalTrainResult {
  ModelParameters params;
  std::uint64_t num_examples = 0;
  // Sample-weighted mean batch loss over the final epoch.
  double final_loss = 0.0;
};

// Runs cfg.local_epochs epochs of mini-batch SGD. Epoch e (0-based) shuffles
// with global epoch index first_epoch + e, so consecutive calls with
// advancing first_epoch reproduce one longer run exactly. The trailing
// partial batch is trained.
LocalTrainResult train_local(const Model& model, const LabeledSamples& data, const TrainConfig& cfg,
                             std::uint64_t first_epoch = 0);

}  // namespace biofed::nn

#endif  // BIOFED_NN_TRAIN_HPP_
