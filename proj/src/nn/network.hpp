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

#ifndef BIOFED_NN_NETWORK_HPP_
#define BIOFED_NN_NETWORK_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nn/params.hpp"
#include "nn/tensor.hpp"

namespace biofed::nn {

struct Conv2d {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
  friend bool operator==(const Conv2d&, const Conv2d&) = default;
};

struct MaxPool2d {
  std::size_t window = 2;
  std::size_t stride = 2;
  friend bool operator==(const MaxPool2d&, const MaxPool2d&) = default;
};

struct Relu {
  friend bool operator==(const Relu&, const Relu&) = default;
};

struct Flatten {
  friend bool operator==(const Flatten&, const Flatten&) = default;
};

struct Dense {
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  friend bool operator==(const Dense&, const Dense&) = default;
};

using LayerSpec = std::variant<Conv2d, MaxPool2d, Relu, Flatten, Dense>;

const char* layer_kind_name(const LayerSpec& layer);

// A layer stack plus the per-sample input shape it accepts ({C, H, W} for
// image models, {F} for dense-only ones).
struct Architecture {
  Shape input_shape;
  std::vector<LayerSpec> layers;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

// conv(C->8, 3x3, pad 1) relu maxpool(2) conv(8->16, 3x3, pad 1) relu
// maxpool(2) flatten dense(->K).
Architecture reference_cnn(const Shape& input_shape, std::size_t num_classes);

// Per-sample shapes: element 0 is the input, element i+1 the output of layer
// i. Throws kShapeMismatch naming the first incompatible layer.
std::vector<Shape> infer_shapes(const Architecture& arch);
Shape output_shape(const Architecture& arch);
std::size_t num_classes(const Architecture& arch);

// Parameter names are "<kind>_<layer index>.<weight|bias>".
std::string param_name(std::size_t layer_index, const LayerSpec& layer, std::string_view which);

// Zero-valued parameters with the architecture's names and shapes.
ModelParameters parameter_schema(const Architecture& arch);

// He-style uniform init, U(-sqrt(6/fan_in), sqrt(6/fan_in)) for weights and
// zero biases. Each tensor draws from its own generator seeded by
// (seed, parameter name).
ModelParameters init_parameters(const Architecture& arch, std::uint64_t seed);

template <class T>
void validate_parameters(const Architecture& arch, const BasicParameters<T>& params);

template <class T>
struct ForwardTrace {
  // activations[0] is the input batch, activations[i + 1] the output of layer i.
  std::vector<BasicTensor<T>> activations;
  // Flat input offsets selected by each maxpool output; empty for other kinds.
  std::vector<std::vector<std::uint32_t>> pool_argmax;
};

// batch is [N, input_shape...]; returns [N, K] logits.
template <class T>
BasicTensor<T> forward(const Architecture& arch, const BasicParameters<T>& params,
                       const BasicTensor<T>& batch, ForwardTrace<T>* trace = nullptr);

// Gradient of the loss with respect to every parameter, given the trace of
// the forward pass that produced the logits and dLoss/dLogits.
template <class T>
BasicParameters<T> backward(const Architecture& arch, const BasicParameters<T>& params,
                            const ForwardTrace<T>& trace, const BasicTensor<T>& grad_logits);

template <class T>
struct LossOutput {
  double loss = 0.0;
  BasicTensor<T> probabilities;
  BasicTensor<T> grad_logits;
};

// Mean softmax cross-entropy over the batch. Row maxima are subtracted
// before exponentiation and sums are accumulated in double.
template <class T>
LossOutput<T> softmax_cross_entropy(const BasicTensor<T>& logits, std::span<const std::uint32_t> labels);

template <class T>
struct GradientResult {
  double loss = 0.0;
  BasicParameters<T> grads;
};

template <class T>
GradientResult<T> compute_gradients(const Architecture& arch, const BasicParameters<T>& params,
                                    const BasicTensor<T>& batch, std::span<const std::uint32_t> labels);

// Index of the largest value; ties go to the lowest index.
template <class T>
std::size_t argmax(std::span<const T> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

struct Model {
  Architecture arch;
  ModelParameters params;
};

}  // namespace biofed::nn

#endif  // BIOFED_NN_NETWORK_HPP_
