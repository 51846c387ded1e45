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

#ifndef BIOFED_METRICS_EVALUATE_HPP_
#define BIOFED_METRICS_EVALUATE_HPP_

#include <vector>

#include "metrics/confusion.hpp"
#include "nn/network.hpp"
#include "nn/train.hpp"

namespace biofed::metrics {

struct Evaluation {
  ConfusionMatrix confusion;
  double mean_loss = 0.0;
  std::vector<std::uint32_t> predictions;
  // Row-major [N x K] class probabilities, computed in double.
  std::vector<double> probabilities;
};

// Batched inference over the samples in their stored order. Predictions are
// the argmax of the logits with ties going to the lowest class index.
Evaluation evaluate_model(const nn::Model& model, const nn::LabeledSamples& test_set, std::size_t batch_size = 64);

}  // namespace biofed::metrics

#endif  // BIOFED_METRICS_EVALUATE_HPP_
