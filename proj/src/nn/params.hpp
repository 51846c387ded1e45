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

#ifndef BIOFED_NN_PARAMS_HPP_
#define BIOFED_NN_PARAMS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "common/bytes.hpp"
#include "common/sha256.hpp"
#include "nn/tensor.hpp"

namespace biofed::nn {

// Bytes hashed into the schema digest: for each entry in order, the u16 name
// length, the UTF-8 name, the u8 rank and each dimension as u32. This is the
// per-entry preamble of the checkpoint layout without the values.
void append_schema_preamble(ByteWriter& out, const std::string& name, const Shape& shape);

// Ordered, uniquely named collection of tensors: one model snapshot, one
// gradient, or one client update.
template <class T>
class BasicParameters {
 public:
  struct Entry {
    std::string name;
    BasicTensor<T> tensor;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  void add(std::string name, BasicTensor<T> tensor) {
    if (find(name) != nullptr) throw Error(ErrorCode::kDuplicate, "parameter name " + name);
    entries_.push_back({std::move(name), std::move(tensor)});
  }

  const BasicTensor<T>* find(const std::string& name) const {
    for (const auto& e : entries_) {
      if (e.name == name) return &e.tensor;
    }
    return nullptr;
  }
  BasicTensor<T>* find(const std::string& name) {
    return const_cast<BasicTensor<T>*>(std::as_const(*this).find(name));
  }

  const BasicTensor<T>& at(const std::string& name) const {
    const auto* t = find(name);
    if (!t) throw Error(ErrorCode::kSchemaMismatch, "no parameter named " + name);
    return *t;
  }
  BasicTensor<T>& at(const std::string& name) {
    return const_cast<BasicTensor<T>&>(std::as_const(*this).at(name));
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Entry& entry(std::size_t i) const { return entries_.at(i); }
  Entry& entry(std::size_t i) { return entries_.at(i); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }

  std::size_t total_values() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.tensor.size();
    return n;
  }

  Digest schema_hash() const {
    ByteWriter w;
    for (const auto& e : entries_) append_schema_preamble(w, e.name, e.tensor.shape());
    return sha256(w.bytes());
  }

  bool same_schema(const BasicParameters& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].name != other.entries_[i].name ||
          entries_[i].tensor.shape() != other.entries_[i].tensor.shape()) {
        return false;
      }
    }
    return true;
  }

  // Same names and shapes, every value zero.
  BasicParameters zeros_like() const {
    BasicParameters out;
    for (const auto& e : entries_) out.add(e.name, BasicTensor<T>(e.tensor.shape()));
    return out;
  }

  template <class U>
  BasicParameters<U> cast() const {
    BasicParameters<U> out;
    for (const auto& e : entries_) out.add(e.name, e.tensor.template cast<U>());
    return out;
  }

  friend bool operator==(const BasicParameters&, const BasicParameters&) = default;

 private:
  std::vector<Entry> entries_;
};

using ModelParameters = BasicParameters<float>;

// Throws kSchemaMismatch when the two collections differ in names or shapes.
template <class T>
void require_same_schema(const BasicParameters<T>& a, const BasicParameters<T>& b, const std::string& context) {
  if (!a.same_schema(b)) throw Error(ErrorCode::kSchemaMismatch, context);
}

// p' = p - lr * g, computed in double and rounded once. Inputs are untouched.
ModelParameters sgd_step(const ModelParameters& params, const ModelParameters& grads, double lr);

double l2_norm(const ModelParameters& params);

}  // namespace biofed::nn

#endif  // BIOFED_NN_PARAMS_HPP_
