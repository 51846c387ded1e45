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

#ifndef BIOFED_FED_FEDAVG_HPP_
#define BIOFED_FED_FEDAVG_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nn/params.hpp"

namespace biofed::fed {

struct FitResult {
  std::string client_id;
  std::uint32_t round = 0;
  nn::ModelParameters params;
  std::uint64_t num_examples = 0;
  double train_loss = 0.0;
};

// Sample-count weighted mean, value = sum_k n_k v_k / sum_k n_k, accumulated
// in double over results sorted by client id and rounded to float once.
// Throws kEmptyInput, kValidation (zero count or duplicate id) or
// kSchemaMismatch naming the offending client.
nn::ModelParameters fedavg(std::span<const FitResult> results);

}  // namespace biofed::fed

#endif  // BIOFED_FED_FEDAVG_HPP_
