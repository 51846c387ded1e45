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

#include "metrics/evaluate.hpp"

#include <cmath>
#include <numeric>

namespace biofed::metrics {

Evaluation evaluate_model(const nn::Model& model, const nn::LabeledSamples& test_set, std::size_t batch_size) {
  if (test_set.empty()) throw Error(ErrorCode::kEmptyInput, "cannot evaluate on an empty test set");
  if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
  const std::size_t k = nn::num_classes(model.arch);
  Evaluation ev{ConfusionMatrix(k), 0.0, {}, {}};
  ev.predictions.reserve(test_set.size());
  ev.probabilities.reserve(test_set.size() * k);
  double loss_sum = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < test_set.size(); start += batch_size) {
    const std::size_t stop = std::min(test_set.size(), start + batch_size);
    idx.resize(stop - start);
    std::iota(idx.begin(), idx.end(), start);
    const nn::Tensor logits = nn::forward(model.arch, model.params, test_set.gather(idx));
    std::span<const std::uint32_t> labels(test_set.labels.data() + start, stop - start);
    const nn::LossOutput<float> loss = nn::softmax_cross_entropy(logits, labels);
    loss_sum += loss.loss * static_cast<double>(idx.size());
    for (std::size_t s = 0; s < idx.size(); ++s) {
      std::span<const float> row(logits.data() + s * k, k);
      const auto pred = static_cast<std::uint32_t>(nn::argmax(row));
      ev.predictions.push_back(pred);
      ev.confusion.add(labels[s], pred);
      double mx = row[0];
      for (float v : row) mx = std::max(mx, static_cast<double>(v));
      double z = 0.0;
      const std::size_t base = ev.probabilities.size();
      for (float v : row) {
        ev.probabilities.push_back(std::exp(static_cast<double>(v) - mx));
        z += ev.probabilities.back();
      }
      for (std::size_t j = 0; j < k; ++j) ev.probabilities[base + j] /= z;
    }
  }
  ev.mean_loss = loss_sum / static_cast<double>(test_set.size());
  return ev;
}

}  // namespace biofed::metrics
