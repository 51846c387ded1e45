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

#include "nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "common/rng.hpp"

namespace biofed::nn {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::string layer_label(std::size_t index, const LayerSpec& layer) {
  return "layer " + std::to_string(index) + " (" + layer_kind_name(layer) + ")";
}

[[noreturn]] void shape_error(std::size_t index, const LayerSpec& layer, const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, layer_label(index, layer) + ": " + what);
}

std::size_t conv_out(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t padding) {
  return (in + 2 * padding - kernel) / stride + 1;
}

Shape infer_layer(const LayerSpec& layer, const Shape& in, std::size_t index) {
  return std::visit(
      Overloaded{
          [&](const Conv2d& c) -> Shape {
            if (c.in_channels == 0 || c.out_channels == 0 || c.kernel == 0 || c.stride == 0) {
              shape_error(index, layer, "hyperparameters must be positive");
            }
            if (in.size() != 3 || in[0] != c.in_channels) {
              shape_error(index, layer, "expects [" + std::to_string(c.in_channels) + "xHxW] input, got " +
                                            shape_to_string(in));
            }
            if (in[1] + 2 * c.padding < c.kernel || in[2] + 2 * c.padding < c.kernel) {
              shape_error(index, layer, "kernel larger than padded input " + shape_to_string(in));
            }
            return {c.out_channels, conv_out(in[1], c.kernel, c.stride, c.padding),
                    conv_out(in[2], c.kernel, c.stride, c.padding)};
          },
          [&](const MaxPool2d& p) -> Shape {
            if (p.window == 0 || p.stride == 0) shape_error(index, layer, "window and stride must be positive");
            if (in.size() != 3 || in[1] < p.window || in[2] < p.window) {
              shape_error(index, layer, "expects CxHxW input at least the window size, got " + shape_to_string(in));
            }
            return {in[0], conv_out(in[1], p.window, p.stride, 0), conv_out(in[2], p.window, p.stride, 0)};
          },
          [&](const Relu&) -> Shape { return in; },
          [&](const Flatten&) -> Shape { return {shape_size(in)}; },
          [&](const Dense& d) -> Shape {
            if (d.in_features == 0 || d.out_features == 0) shape_error(index, layer, "features must be positive");
            if (in.size() != 1 || in[0] != d.in_features) {
              shape_error(index, layer, "expects [" + std::to_string(d.in_features) + "] input, got " +
                                            shape_to_string(in));
            }
            return {d.out_features};
          },
      },
      layer);
}

Shape batch_shape(std::size_t n, const Shape& sample) {
  Shape s{n};
  s.insert(s.end(), sample.begin(), sample.end());
  return s;
}

template <class T>
void check_finite(const BasicTensor<T>& t, std::size_t index, const LayerSpec& layer) {
  if (!t.all_finite()) {
    throw Error(ErrorCode::kNonFinite, layer_label(index, layer) + " produced a non-finite activation");
  }
}

// ---- conv2d ---------------------------------------------------------------

// Kernel offsets [lo, hi) that land inside an input of `extent` for a window
// starting at `origin`; empty when the window sits wholly in the padding.
std::pair<std::size_t, std::size_t> kernel_span(std::ptrdiff_t origin, std::size_t extent, std::size_t k) {
  const auto kk = static_cast<std::ptrdiff_t>(k);
  const std::ptrdiff_t lo = std::clamp<std::ptrdiff_t>(-origin, 0, kk);
  const std::ptrdiff_t hi = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(extent) - origin, lo, kk);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

template <class T>
BasicTensor<T> conv_forward(const Conv2d& c, const BasicTensor<T>& x, const BasicTensor<T>& w,
                            const BasicTensor<T>& b) {
  const std::size_t n = x.dim(0), ic = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t oc = c.out_channels, k = c.kernel;
  const std::size_t oh = conv_out(h, k, c.stride, c.padding), ow = conv_out(wd, k, c.stride, c.padding);
  BasicTensor<T> y({n, oc, oh, ow});
  const T* xp = x.data();
  const T* wp = w.data();
  T* yp = y.data();
  const auto pad = static_cast<std::ptrdiff_t>(c.padding);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t o = 0; o < oc; ++o) {
      for (std::size_t r = 0; r < oh; ++r) {
        const std::ptrdiff_t r0 = static_cast<std::ptrdiff_t>(r * c.stride) - pad;
        const auto [kr_lo, kr_hi] = kernel_span(r0, h, k);
        for (std::size_t q = 0; q < ow; ++q) {
          const std::ptrdiff_t q0 = static_cast<std::ptrdiff_t>(q * c.stride) - pad;
          const auto [kq_lo, kq_hi] = kernel_span(q0, wd, k);
          double acc = static_cast<double>(b[o]);
          for (std::size_t i = 0; i < ic; ++i) {
            const T* xc = xp + ((s * ic + i) * h) * wd;
            const T* wc = wp + ((o * ic + i) * k) * k;
            for (std::size_t kr = kr_lo; kr < kr_hi; ++kr) {
              const T* xrow = xc + static_cast<std::size_t>(r0 + static_cast<std::ptrdiff_t>(kr)) * wd;
              const T* wrow = wc + kr * k;
              for (std::size_t kq = kq_lo; kq < kq_hi; ++kq) {
                acc += static_cast<double>(wrow[kq]) *
                       static_cast<double>(xrow[static_cast<std::size_t>(q0 + static_cast<std::ptrdiff_t>(kq))]);
              }
            }
          }
          yp[((s * oc + o) * oh + r) * ow + q] = static_cast<T>(acc);
        }
      }
    }
  }
  return y;
}

template <class T>
void conv_backward(const Conv2d& c, const BasicTensor<T>& x, const BasicTensor<T>& w, const BasicTensor<T>& gy,
                   BasicTensor<T>& gw, BasicTensor<T>& gb, BasicTensor<T>* gx) {
  const std::size_t n = x.dim(0), ic = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t oc = c.out_channels, k = c.kernel;
  const std::size_t oh = gy.dim(2), ow = gy.dim(3);
  std::vector<double> acc_w(gw.size(), 0.0), acc_b(gb.size(), 0.0);
  std::vector<double> acc_x(gx ? gx->size() : 0, 0.0);
  const T* xp = x.data();
  const T* wp = w.data();
  const T* gp = gy.data();
  const auto pad = static_cast<std::ptrdiff_t>(c.padding);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t o = 0; o < oc; ++o) {
      for (std::size_t r = 0; r < oh; ++r) {
        const std::ptrdiff_t r0 = static_cast<std::ptrdiff_t>(r * c.stride) - pad;
        const auto [kr_lo, kr_hi] = kernel_span(r0, h, k);
        for (std::size_t q = 0; q < ow; ++q) {
          const double g = static_cast<double>(gp[((s * oc + o) * oh + r) * ow + q]);
          if (g == 0.0) continue;
          acc_b[o] += g;
          const std::ptrdiff_t q0 = static_cast<std::ptrdiff_t>(q * c.stride) - pad;
          const auto [kq_lo, kq_hi] = kernel_span(q0, wd, k);
          for (std::size_t i = 0; i < ic; ++i) {
            const std::size_t xbase = ((s * ic + i) * h) * wd;
            const std::size_t wbase = ((o * ic + i) * k) * k;
            for (std::size_t kr = kr_lo; kr < kr_hi; ++kr) {
              const std::size_t xr = xbase + static_cast<std::size_t>(r0 + static_cast<std::ptrdiff_t>(kr)) * wd;
              for (std::size_t kq = kq_lo; kq < kq_hi; ++kq) {
                const std::size_t xi = xr + static_cast<std::size_t>(q0 + static_cast<std::ptrdiff_t>(kq));
                acc_w[wbase + kr * k + kq] += g * static_cast<double>(xp[xi]);
                if (gx) acc_x[xi] += g * static_cast<double>(wp[wbase + kr * k + kq]);
              }
            }
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < acc_w.size(); ++i) gw[i] = static_cast<T>(acc_w[i]);
  for (std::size_t i = 0; i < acc_b.size(); ++i) gb[i] = static_cast<T>(acc_b[i]);
  if (gx) {
    for (std::size_t i = 0; i < acc_x.size(); ++i) (*gx)[i] = static_cast<T>(acc_x[i]);
  }
}

// ---- maxpool2d ------------------------------------------------------------

template <class T>
BasicTensor<T> pool_forward(const MaxPool2d& p, const BasicTensor<T>& x, std::vector<std::uint32_t>& argmax_out) {
  const std::size_t n = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = conv_out(h, p.window, p.stride, 0), ow = conv_out(w, p.window, p.stride, 0);
  BasicTensor<T> y({n, ch, oh, ow});
  argmax_out.assign(y.size(), 0);
  std::size_t out = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t c = 0; c < ch; ++c) {
      const std::size_t base = (s * ch + c) * h * w;
      for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t q = 0; q < ow; ++q, ++out) {
          std::size_t best = base + (r * p.stride) * w + q * p.stride;
          for (std::size_t kr = 0; kr < p.window; ++kr) {
            for (std::size_t kq = 0; kq < p.window; ++kq) {
              const std::size_t idx = base + (r * p.stride + kr) * w + q * p.stride + kq;
              if (x[idx] > x[best]) best = idx;
            }
          }
          y[out] = x[best];
          argmax_out[out] = static_cast<std::uint32_t>(best);
        }
      }
    }
  }
  return y;
}

// ---- dense ----------------------------------------------------------------

template <class T>
BasicTensor<T> dense_forward(const Dense& d, const BasicTensor<T>& x, const BasicTensor<T>& w,
                             const BasicTensor<T>& b) {
  const std::size_t n = x.dim(0), in = d.in_features, out = d.out_features;
  BasicTensor<T> y({n, out});
  for (std::size_t s = 0; s < n; ++s) {
    const T* xr = x.data() + s * in;
    for (std::size_t o = 0; o < out; ++o) {
      const T* wr = w.data() + o * in;
      double acc = static_cast<double>(b[o]);
      for (std::size_t i = 0; i < in; ++i) acc += static_cast<double>(wr[i]) * static_cast<double>(xr[i]);
      y[s * out + o] = static_cast<T>(acc);
    }
  }
  return y;
}

template <class T>
void dense_backward(const Dense& d, const BasicTensor<T>& x, const BasicTensor<T>& w, const BasicTensor<T>& gy,
                    BasicTensor<T>& gw, BasicTensor<T>& gb, BasicTensor<T>* gx) {
  const std::size_t n = x.dim(0), in = d.in_features, out = d.out_features;
  std::vector<double> acc_w(gw.size(), 0.0), acc_b(gb.size(), 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const T* xr = x.data() + s * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double g = static_cast<double>(gy[s * out + o]);
      acc_b[o] += g;
      double* awr = acc_w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) awr[i] += g * static_cast<double>(xr[i]);
    }
    if (gx) {
      for (std::size_t i = 0; i < in; ++i) {
        double acc = 0.0;
        for (std::size_t o = 0; o < out; ++o) {
          acc += static_cast<double>(gy[s * out + o]) * static_cast<double>(w[o * in + i]);
        }
        (*gx)[s * in + i] = static_cast<T>(acc);
      }
    }
  }
  for (std::size_t i = 0; i < acc_w.size(); ++i) gw[i] = static_cast<T>(acc_w[i]);
  for (std::size_t i = 0; i < acc_b.size(); ++i) gb[i] = static_cast<T>(acc_b[i]);
}

void weight_shapes(const LayerSpec& layer, Shape& weight, Shape& bias, std::size_t& fan_in) {
  if (const auto* c = std::get_if<Conv2d>(&layer)) {
    weight = {c->out_channels, c->in_channels, c->kernel, c->kernel};
    bias = {c->out_channels};
    fan_in = c->in_channels * c->kernel * c->kernel;
  } else if (const auto* d = std::get_if<Dense>(&layer)) {
    weight = {d->out_features, d->in_features};
    bias = {d->out_features};
    fan_in = d->in_features;
  } else {
    weight.clear();
    bias.clear();
    fan_in = 0;
  }
}

}  // namespace

const char* layer_kind_name(const LayerSpec& layer) {
  return std::visit(Overloaded{
                        [](const Conv2d&) { return "conv2d"; },
                        [](const MaxPool2d&) { return "maxpool2d"; },
                        [](const Relu&) { return "relu"; },
                        [](const Flatten&) { return "flatten"; },
                        [](const Dense&) { return "dense"; },
                    },
                    layer);
}

Architecture reference_cnn(const Shape& input_shape, std::size_t num_classes) {
  if (input_shape.size() != 3) {
    throw Error(ErrorCode::kShapeMismatch, "reference CNN needs a CxHxW input shape, got " +
                                               shape_to_string(input_shape));
  }
  if (num_classes == 0) throw Error(ErrorCode::kInvalidArgument, "num_classes must be positive");
  Architecture arch;
  arch.input_shape = input_shape;
  arch.layers = {Conv2d{input_shape[0], 8, 3, 1, 1}, Relu{}, MaxPool2d{2, 2},
                 Conv2d{8, 16, 3, 1, 1},             Relu{}, MaxPool2d{2, 2},
                 Flatten{}};
  Architecture probe = arch;
  const std::size_t features = shape_size(infer_shapes(probe).back());
  arch.layers.push_back(Dense{features, num_classes});
  return arch;
}

std::vector<Shape> infer_shapes(const Architecture& arch) {
  if (arch.input_shape.empty() || shape_size(arch.input_shape) == 0) {
    throw Error(ErrorCode::kShapeMismatch, "architecture input shape is empty");
  }
  std::vector<Shape> shapes{arch.input_shape};
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    shapes.push_back(infer_layer(arch.layers[i], shapes.back(), i));
  }
  return shapes;
}

Shape output_shape(const Architecture& arch) { return infer_shapes(arch).back(); }

std::size_t num_classes(const Architecture& arch) {
  const Shape out = output_shape(arch);
  if (out.size() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "classifier output must be rank 1, got " + shape_to_string(out));
  }
  return out[0];
}

std::string param_name(std::size_t layer_index, const LayerSpec& layer, std::string_view which) {
  return std::string(layer_kind_name(layer)) + "_" + std::to_string(layer_index) + "." + std::string(which);
}

ModelParameters parameter_schema(const Architecture& arch) {
  infer_shapes(arch);
  ModelParameters params;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    Shape w, b;
    std::size_t fan_in = 0;
    weight_shapes(arch.layers[i], w, b, fan_in);
    if (w.empty()) continue;
    params.add(param_name(i, arch.layers[i], "weight"), Tensor(w));
    params.add(param_name(i, arch.layers[i], "bias"), Tensor(b));
  }
  return params;
}

ModelParameters init_parameters(const Architecture& arch, std::uint64_t seed) {
  ModelParameters params = parameter_schema(arch);
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    Shape w, b;
    std::size_t fan_in = 0;
    weight_shapes(arch.layers[i], w, b, fan_in);
    if (w.empty()) continue;
    const std::string name = param_name(i, arch.layers[i], "weight");
    Rng rng(derive_seed(seed, name));
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (float& v : params.at(name).values()) v = static_cast<float>(rng.uniform(-bound, bound));
  }
  return params;
}

template <class T>
void validate_parameters(const Architecture& arch, const BasicParameters<T>& params) {
  const ModelParameters schema = parameter_schema(arch);
  if (schema.size() != params.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "expected " + std::to_string(schema.size()) + " parameter tensors, got " +
                                                std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& want = schema.entry(i);
    const auto& got = params.entry(i);
    if (want.name != got.name || want.tensor.shape() != got.tensor.shape()) {
      throw Error(ErrorCode::kSchemaMismatch, "parameter " + std::to_string(i) + ": expected " + want.name +
                                                  shape_to_string(want.tensor.shape()) + ", got " + got.name +
                                                  shape_to_string(got.tensor.shape()));
    }
  }
}

template <class T>
BasicTensor<T> forward(const Architecture& arch, const BasicParameters<T>& params, const BasicTensor<T>& batch,
                       ForwardTrace<T>* trace) {
  const std::vector<Shape> shapes = infer_shapes(arch);
  validate_parameters(arch, params);
  if (batch.rank() != arch.input_shape.size() + 1 ||
      !std::equal(arch.input_shape.begin(), arch.input_shape.end(), batch.shape().begin() + 1)) {
    if (arch.layers.empty()) throw Error(ErrorCode::kShapeMismatch, "batch shape does not match input");
    shape_error(0, arch.layers.front(), "batch shape " + shape_to_string(batch.shape()) +
                                            " does not match N x " + shape_to_string(arch.input_shape));
  }
  if (!batch.all_finite()) throw Error(ErrorCode::kNonFinite, "input batch contains non-finite values");
  const std::size_t n = batch.dim(0);

  ForwardTrace<T> local;
  ForwardTrace<T>& tr = trace ? *trace : local;
  tr.activations.clear();
  tr.pool_argmax.assign(arch.layers.size(), {});
  tr.activations.push_back(batch);

  for (std::size_t li = 0; li < arch.layers.size(); ++li) {
    const LayerSpec& layer = arch.layers[li];
    const BasicTensor<T>& x = tr.activations.back();
    BasicTensor<T> y = std::visit(
        Overloaded{
            [&](const Conv2d& c) {
              return conv_forward(c, x, params.at(param_name(li, layer, "weight")),
                                  params.at(param_name(li, layer, "bias")));
            },
            [&](const MaxPool2d& p) { return pool_forward(p, x, tr.pool_argmax[li]); },
            [&](const Relu&) {
              BasicTensor<T> out = x;
              for (T& v : out.values()) v = v > T{0} ? v : T{0};
              return out;
            },
            [&](const Flatten&) {
              return BasicTensor<T>(batch_shape(n, shapes[li + 1]),
                                    std::vector<T>(x.values().begin(), x.values().end()));
            },
            [&](const Dense& d) {
              return dense_forward(d, x, params.at(param_name(li, layer, "weight")),
                                   params.at(param_name(li, layer, "bias")));
            },
        },
        layer);
    check_finite(y, li, layer);
    tr.activations.push_back(std::move(y));
  }
  if (trace) return tr.activations.back();
  return std::move(tr.activations.back());
}

template <class T>
BasicParameters<T> backward(const Architecture& arch, const BasicParameters<T>& params, const ForwardTrace<T>& trace,
                            const BasicTensor<T>& grad_logits) {
  validate_parameters(arch, params);
  if (trace.activations.size() != arch.layers.size() + 1) {
    throw Error(ErrorCode::kInvalidArgument, "forward trace does not belong to this architecture");
  }
  if (grad_logits.shape() != trace.activations.back().shape()) {
    throw Error(ErrorCode::kShapeMismatch, "gradient shape " + shape_to_string(grad_logits.shape()) +
                                               " does not match logits " +
                                               shape_to_string(trace.activations.back().shape()));
  }
  BasicParameters<T> grads = params.zeros_like();
  BasicTensor<T> gy = grad_logits;
  for (std::size_t li = arch.layers.size(); li-- > 0;) {
    const LayerSpec& layer = arch.layers[li];
    const BasicTensor<T>& x = trace.activations[li];
    const bool need_input_grad = li > 0;
    BasicTensor<T> gx(x.shape());
    std::visit(Overloaded{
                   [&](const Conv2d& c) {
                     conv_backward(c, x, params.at(param_name(li, layer, "weight")), gy,
                                   grads.at(param_name(li, layer, "weight")),
                                   grads.at(param_name(li, layer, "bias")), need_input_grad ? &gx : nullptr);
                   },
                   [&](const MaxPool2d&) {
                     const auto& sel = trace.pool_argmax[li];
                     for (std::size_t i = 0; i < sel.size(); ++i) gx[sel[i]] += gy[i];
                   },
                   [&](const Relu&) {
                     for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = x[i] > T{0} ? gy[i] : T{0};
                   },
                   [&](const Flatten&) { std::copy(gy.values().begin(), gy.values().end(), gx.values().begin()); },
                   [&](const Dense& d) {
                     dense_backward(d, x, params.at(param_name(li, layer, "weight")), gy,
                                    grads.at(param_name(li, layer, "weight")),
                                    grads.at(param_name(li, layer, "bias")), need_input_grad ? &gx : nullptr);
                   },
               },
               layer);
    if (!need_input_grad) break;
    gy = std::move(gx);
  }
  for (const auto& e : grads) {
    if (!e.tensor.all_finite()) throw Error(ErrorCode::kNonFinite, "non-finite gradient for " + e.name);
  }
  return grads;
}

template <class T>
LossOutput<T> softmax_cross_entropy(const BasicTensor<T>& logits, std::span<const std::uint32_t> labels) {
  if (logits.rank() != 2) {
    throw Error(ErrorCode::kShapeMismatch, "logits must be [N x K], got " + shape_to_string(logits.shape()));
  }
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  if (labels.size() != n) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected " + std::to_string(n) + " labels, got " + std::to_string(labels.size()));
  }
  LossOutput<T> out{0.0, BasicTensor<T>(logits.shape()), BasicTensor<T>(logits.shape())};
  double total = 0.0;
  std::vector<double> p(k);
  for (std::size_t s = 0; s < n; ++s) {
    if (labels[s] >= k) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "label " + std::to_string(labels[s]) + " not in [0, " + std::to_string(k) + ")");
    }
    const T* row = logits.data() + s * k;
    double mx = static_cast<double>(row[0]);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, static_cast<double>(row[j]));
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      p[j] = std::exp(static_cast<double>(row[j]) - mx);
      z += p[j];
    }
    const double log_z = std::log(z);
    total += log_z - (static_cast<double>(row[labels[s]]) - mx);
    for (std::size_t j = 0; j < k; ++j) {
      const double pj = p[j] / z;
      out.probabilities[s * k + j] = static_cast<T>(pj);
      out.grad_logits[s * k + j] = static_cast<T>((pj - (j == labels[s] ? 1.0 : 0.0)) / static_cast<double>(n));
    }
  }
  out.loss = total / static_cast<double>(n);
  return out;
}

template <class T>
GradientResult<T> compute_gradients(const Architecture& arch, const BasicParameters<T>& params,
                                    const BasicTensor<T>& batch, std::span<const std::uint32_t> labels) {
  ForwardTrace<T> trace;
  const BasicTensor<T> logits = forward(arch, params, batch, &trace);
  LossOutput<T> loss = softmax_cross_entropy(logits, labels);
  return {loss.loss, backward(arch, params, trace, loss.grad_logits)};
}

#define BIOFED_INSTANTIATE_NETWORK(T)                                                                          \
  template void validate_parameters<T>(const Architecture&, const BasicParameters<T>&);                       \
  template BasicTensor<T> forward<T>(const Architecture&, const BasicParameters<T>&, const BasicTensor<T>&, \
                                     ForwardTrace<T>*);                                                      \
  template BasicParameters<T> backward<T>(const Architecture&, const BasicParameters<T>&,                     \
                                          const ForwardTrace<T>&, const BasicTensor<T>&);                     \
  template LossOutput<T> softmax_cross_entropy<T>(const BasicTensor<T>&, std::span<const std::uint32_t>);     \
  template GradientResult<T> compute_gradients<T>(const Architecture&, const BasicParameters<T>&,             \
                                                  const BasicTensor<T>&, std::span<const std::uint32_t>);

BIOFED_INSTANTIATE_NETWORK(float)
BIOFED_INSTANTIATE_NETWORK(double)

#undef BIOFED_INSTANTIATE_NETWORK

}  // namespace biofed::nn
