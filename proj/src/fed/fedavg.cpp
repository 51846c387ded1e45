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

#include "fed/fedavg.hpp"

#include <algorithm>

namespace biofed::fed {

nn::ModelParameters fedavg(std::span<const FitResult> results) {
  if (results.empty()) throw Error(ErrorCode::kEmptyInput, "fedavg needs at least one result");
  std::vector<const FitResult*> order;
  for (const auto& r : results) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->client_id < b->client_id; });

  const nn::ModelParameters& reference = order.front()->params;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const FitResult& r = *order[i];
    if (i > 0 && r.client_id == order[i - 1]->client_id) {
      throw Error(ErrorCode::kValidation, "duplicate result from " + r.client_id);
    }
    if (r.num_examples == 0) throw Error(ErrorCode::kValidation, r.client_id + " reported zero examples");
    if (r.params.schema_hash() != reference.schema_hash()) {
      throw Error(ErrorCode::kSchemaMismatch, r.client_id + " returned parameters with a different schema");
    }
    total += r.num_examples;
  }

  nn::ModelParameters out = reference.zeros_like();
  const double denom = static_cast<double>(total);
  std::vector<double> acc;
  for (std::size_t e = 0; e < out.size(); ++e) {
    auto dst = out.entry(e).tensor.values();
    acc.assign(dst.size(), 0.0);
    for (const FitResult* r : order) {
      const double w = static_cast<double>(r->num_examples);
      auto src = r->params.entry(e).tensor.values();
      for (std::size_t j = 0; j < dst.size(); ++j) acc[j] += w * static_cast<double>(src[j]);
    }
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = static_cast<float>(acc[j] / denom);
  }
  return out;
}

}  // namespace biofed::fed
