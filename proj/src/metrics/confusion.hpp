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

#ifndef BIOFED_METRICS_CONFUSION_HPP_
#define BIOFED_METRICS_CONFUSION_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace biofed::metrics {

// Rows are the true class, columns the predicted class.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t num_classes)
      : k_(num_classes), counts_(num_classes * num_classes, 0) {}
  ConfusionMatrix(std::size_t num_classes, std::vector<std::uint64_t> counts);

  std::size_t num_classes() const noexcept { return k_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_.at(truth * k_ + predicted); }
  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1);

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t truth) const;
  std::uint64_t col_sum(std::size_t predicted) const;
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  ConfusionMatrix transposed() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint64_t> counts_;
};

// Throws kShapeMismatch on length mismatch and kLabelOutOfRange for labels
// outside [0, K).
ConfusionMatrix confusion(std::span<const std::uint32_t> truth, std::span<const std::uint32_t> predicted,
                          std::size_t num_classes);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  // Set when the corresponding ratio had a zero denominator and 0 was used.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

enum class ZeroSupportPolicy { kInclude, kExclude };

struct MetricsReport {
  std::size_t num_classes = 0;
  std::uint64_t total = 0;
  bool empty_evaluation = false;
  double accuracy = 0.0;
  std::vector<ClassScores> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

// Zero denominators yield 0 and set the matching flag. With kExclude,
// classes with zero support are left out of the macro averages.
MetricsReport derive_metrics(const ConfusionMatrix& cm, ZeroSupportPolicy policy = ZeroSupportPolicy::kInclude);

struct MetricDelta {
  std::string name;
  double centralized = 0.0;
  double federated = 0.0;
  double delta = 0.0;  // federated - centralized
};

struct ComparisonReport {
  std::vector<MetricDelta> deltas;
  double threshold = 0.05;
  bool close = false;  // accuracy gap <= threshold
};

struct EvaluatedRun {
  MetricsReport report;
  std::string test_set_hash;
};

// kMismatchedTestSet when K or the test-set hash differ.
ComparisonReport compare_runs(const EvaluatedRun& centralized, const EvaluatedRun& federated,
                              double accuracy_threshold = 0.05);

}  // namespace biofed::metrics

#endif  // BIOFED_METRICS_CONFUSION_HPP_
