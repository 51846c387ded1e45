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

#include "nn/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "common/rng.hpp"

namespace biofed::nn {

void TrainConfig::validate() const {
  std::string problems;
  auto add = [&](const std::string& msg) { problems += (problems.empty() ? "" : "; ") + msg; };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) add("learning_rate must be > 0");
  if (batch_size < 1) add("batch_size must be >= 1");
  if (local_epochs < 1) add("local_epochs must be >= 1");
  if (!problems.empty()) throw Error(ErrorCode::kValidation, problems);
}

void LabeledSamples::append(std::span<const float> values, std::uint32_t label) {
  if (values.size() != sample_size()) {
    throw Error(ErrorCode::kShapeMismatch, "sample has " + std::to_string(values.size()) + " values, expected " +
                                               std::to_string(sample_size()));
  }
  pixels.insert(pixels.end(), values.begin(), values.end());
  labels.push_back(label);
}

Tensor LabeledSamples::gather(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw Error(ErrorCode::kEmptyInput, "cannot gather an empty batch");
  Shape shape{indices.size()};
  shape.insert(shape.end(), sample_shape.begin(), sample_shape.end());
  std::vector<float> values;
  values.reserve(indices.size() * sample_size());
  for (std::size_t i : indices) {
    if (i >= size()) throw Error(ErrorCode::kInvalidArgument, "sample index out of range");
    auto s = sample(i);
    values.insert(values.end(), s.begin(), s.end());
  }
  return Tensor(std::move(shape), std::move(values));
}

Tensor LabeledSamples::all() const {
  std::vector<std::size_t> idx(size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return gather(idx);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::uint64_t global_epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(derive_seed(seed, "shuffle"), global_epoch));
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

LocalTrainResult train_local(const Model& model, const LabeledSamples& data, const TrainConfig& cfg,
                             std::uint64_t first_epoch) {
  cfg.validate();
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "cannot train on an empty shard");
  if (data.sample_shape != model.arch.input_shape) {
    throw Error(ErrorCode::kShapeMismatch, "shard sample shape " + shape_to_string(data.sample_shape) +
                                               " does not match model input " +
                                               shape_to_string(model.arch.input_shape));
  }
  LocalTrainResult result{model.params, data.size(), 0.0};
  std::vector<std::uint32_t> labels;
  for (std::uint32_t e = 0; e < cfg.local_epochs; ++e) {
    const auto order = epoch_order(data.size(), cfg.seed, first_epoch + e);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::span<const std::size_t> idx(order.data() + start, stop - start);
      labels.clear();
      for (std::size_t i : idx) labels.push_back(data.labels[i]);
      const GradientResult<float> g = compute_gradients(model.arch, result.params, data.gather(idx), labels);
      result.params = sgd_step(result.params, g.grads, cfg.learning_rate);
      weighted += g.loss * static_cast<double>(idx.size());
    }
    result.final_loss = weighted / static_cast<double>(data.size());
  }
  return result;
}

}  // namespace biofed::nn
