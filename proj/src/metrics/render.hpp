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

#ifndef BIOFED_METRICS_RENDER_HPP_
#define BIOFED_METRICS_RENDER_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "metrics/confusion.hpp"

namespace biofed::metrics {

// Header row of class names, then K rows of counts.
std::string confusion_to_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names);

// Grid heatmap with per-cell count labels; rows = true, columns = predicted.
std::string confusion_to_svg(const ConfusionMatrix& cm, const std::vector<std::string>& class_names,
                             const std::string& title);

nlohmann::json metrics_to_json(const MetricsReport& report, const std::vector<std::string>& class_names);
nlohmann::json confusion_to_json(const ConfusionMatrix& cm);
ConfusionMatrix confusion_from_json(const nlohmann::json& doc);
nlohmann::json comparison_to_json(const ComparisonReport& report);

// Plain-text table of per-class and macro scores.
std::string metrics_table(const MetricsReport& report, const std::vector<std::string>& class_names);

}  // namespace biofed::metrics

#endif  // BIOFED_METRICS_RENDER_HPP_
