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

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "nn/train.hpp"
#include "support/test_util.hpp"

namespace biofed::nn {
namespace {

LabeledSamples separable(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  LabeledSamples data{{4}, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t label = static_cast<std::uint32_t>(i % 2);
    std::vector<float> x(4);
    for (float& v : x) v = static_cast<float>(rng.normal() * 0.3 + (label ? 1.0 : -1.0));
    data.append(x, label);
  }
  return data;
}

TEST(EpochOrderTest, PermutationAndDeterministic) {
  for (std::size_t n : {1u, 2u, 17u, 100u}) {
    const auto a = epoch_order(n, 5, 0);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), 0);
    EXPECT_EQ(sorted, identity);
    EXPECT_EQ(a, epoch_order(n, 5, 0));
  }
  EXPECT_NE(epoch_order(50, 5, 0), epoch_order(50, 5, 1));
  EXPECT_NE(epoch_order(50, 5, 0), epoch_order(50, 6, 0));
}

TEST(TrainConfigTest, ValidationListsEveryProblem) {
  TrainConfig cfg;
  cfg.learning_rate = -1;
  cfg.batch_size = 0;
  cfg.local_epochs = 0;
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("learning_rate"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch_size"), std::string::npos) << msg;
    EXPECT_NE(msg.find("local_epochs"), std::string::npos) << msg;
  }
}

TEST(TrainLocalTest, LearnsSeparableData) {
  const Architecture arch{{4}, {Dense{4, 8}, Relu{}, Dense{8, 2}}};
  const Model model{arch, init_parameters(arch, 3)};
  const LabeledSamples data = separable(64, 1);
  TrainConfig cfg{0.1, 8, 20, 4};
  const double before = softmax_cross_entropy(forward(arch, model.params, data.all()), data.labels).loss;
  const LocalTrainResult r = train_local(model, data, cfg);
  const double after = softmax_cross_entropy(forward(arch, r.params, data.all()), data.labels).loss;
  EXPECT_EQ(r.num_examples, 64u);
  EXPECT_LT(after, before * 0.5);
  EXPECT_LT(r.final_loss, before);
}

TEST(TrainLocalTest, SeededRunsAreBitIdentical) {
  const Architecture arch = reference_cnn({1, 8, 8}, 3);
  const Model model{arch, init_parameters(arch, 3)};
  Rng rng(2);
  LabeledSamples data{{1, 8, 8}, {}, {}};
  for (int i = 0; i < 21; ++i) {
    std::vector<float> x(64);
    for (float& v : x) v = static_cast<float>(rng.normal());
    data.append(x, static_cast<std::uint32_t>(i % 3));
  }
  const TrainConfig cfg{0.05, 4, 2, 11};
  const auto a = train_local(model, data, cfg);
  const auto b = train_local(model, data, cfg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.final_loss, b.final_loss);
  const auto c = train_local(model, data, TrainConfig{0.05, 4, 2, 12});
  EXPECT_NE(a.params, c.params);
}

TEST(TrainLocalTest, EpochOffsetsCompose) {
  // Two calls of one epoch with offsets 0 and 1 equal one call of two epochs.
  const Architecture arch{{4}, {Dense{4, 2}}};
  const Model model{arch, init_parameters(arch, 5)};
  const LabeledSamples data = separable(13, 9);
  const auto two = train_local(model, data, TrainConfig{0.1, 4, 2, 3});
  const auto first = train_local(model, data, TrainConfig{0.1, 4, 1, 3}, 0);
  const auto second = train_local(Model{arch, first.params}, data, TrainConfig{0.1, 4, 1, 3}, 1);
  EXPECT_EQ(two.params, second.params);
}

TEST(TrainLocalTest, PartialBatchIsTrained) {
  // Batch larger than the data: one update per epoch still happens.
  const Architecture arch{{4}, {Dense{4, 2}}};
  const Model model{arch, init_parameters(arch, 5)};
  const LabeledSamples data = separable(3, 9);
  const auto r = train_local(model, data, TrainConfig{0.1, 16, 1, 3});
  EXPECT_NE(r.params, model.params);
}

TEST(TrainLocalTest, RejectsEmptyAndMismatchedData) {
  const Architecture arch{{4}, {Dense{4, 2}}};
  const Model model{arch, init_parameters(arch, 5)};
  EXPECT_ERROR_CODE(train_local(model, LabeledSamples{{4}, {}, {}}, TrainConfig{}), ErrorCode::kEmptyInput);
  LabeledSamples wrong{{5}, {}, {}};
  wrong.append(std::vector<float>(5, 0.0f), 0);
  EXPECT_ERROR_CODE(train_local(model, wrong, TrainConfig{}), ErrorCode::kShapeMismatch);
  LabeledSamples bad_label{{4}, {}, {}};
  bad_label.append(std::vector<float>(4, 0.0f), 7);
  EXPECT_ERROR_CODE(train_local(model, bad_label, TrainConfig{}), ErrorCode::kLabelOutOfRange);
}

}  // namespace
}  // namespace biofed::nn
