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

#include "metrics/confusion.hpp"

#include "common/error.hpp"

namespace biofed::metrics {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes, std::vector<std::uint64_t> counts)
    : k_(num_classes), counts_(std::move(counts)) {
  if (counts_.size() != k_ * k_) {
    throw Error(ErrorCode::kShapeMismatch, "confusion matrix needs K*K counts");
  }
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t n) {
  if (truth >= k_ || predicted >= k_) {
    throw Error(ErrorCode::kLabelOutOfRange, "label outside [0, " + std::to_string(k_) + ")");
  }
  counts_[truth * k_ + predicted] += n;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (auto v : counts_) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += counts_[i * k_ + i];
  return s;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < k_; ++j) s += at(truth, j);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += at(i, predicted);
  return s;
}

ConfusionMatrix ConfusionMatrix::transposed() const {
  ConfusionMatrix t(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) t.counts_[j * k_ + i] = counts_[i * k_ + j];
  }
  return t;
}

ConfusionMatrix confusion(std::span<const std::uint32_t> truth, std::span<const std::uint32_t> predicted,
                          std::size_t num_classes) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kShapeMismatch, "truth has " + std::to_string(truth.size()) +
                                               " labels, predictions " + std::to_string(predicted.size()));
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

MetricsReport derive_metrics(const ConfusionMatrix& cm, ZeroSupportPolicy policy) {
  MetricsReport r;
  r.num_classes = cm.num_classes();
  r.total = cm.total();
  r.empty_evaluation = r.total == 0;
  r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(cm.trace()) / static_cast<double>(r.total);
  std::size_t counted = 0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    ClassScores s;
    const std::uint64_t tp = cm.at(c, c);
    const std::uint64_t predicted = cm.col_sum(c);
    s.support = cm.row_sum(c);
    s.precision_undefined = predicted == 0;
    s.recall_undefined = s.support == 0;
    s.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
    s.recall = s.support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(s.support);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    r.per_class.push_back(s);
    if (policy == ZeroSupportPolicy::kExclude && s.support == 0) continue;
    r.macro_precision += s.precision;
    r.macro_recall += s.recall;
    r.macro_f1 += s.f1;
    ++counted;
  }
  if (counted > 0) {
    r.macro_precision /= static_cast<double>(counted);
    r.macro_recall /= static_cast<double>(counted);
    r.macro_f1 /= static_cast<double>(counted);
  }
  return r;
}

ComparisonReport compare_runs(const EvaluatedRun& centralized, const EvaluatedRun& federated,
                              double accuracy_threshold) {
  if (centralized.report.num_classes != federated.report.num_classes) {
    throw Error(ErrorCode::kMismatchedTestSet, "runs were evaluated with different class counts");
  }
  if (centralized.test_set_hash != federated.test_set_hash) {
    throw Error(ErrorCode::kMismatchedTestSet, "runs were evaluated on different test sets");
  }
  if (!(accuracy_threshold >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be >= 0");
  ComparisonReport out;
  out.threshold = accuracy_threshold;
  auto add = [&](const char* name, double c, double f) { out.deltas.push_back({name, c, f, f - c}); };
  add("accuracy", centralized.report.accuracy, federated.report.accuracy);
  add("macro_precision", centralized.report.macro_precision, federated.report.macro_precision);
  add("macro_recall", centralized.report.macro_recall, federated.report.macro_recall);
  add("macro_f1", centralized.report.macro_f1, federated.report.macro_f1);
  // A tiny slack keeps exact-threshold gaps (0.90 vs 0.85) on the close side
  // despite binary rounding of the subtraction.
  out.close = centralized.report.accuracy - federated.report.accuracy <= accuracy_threshold + 1e-12;
  return out;
}

}  // namespace biofed::metrics
