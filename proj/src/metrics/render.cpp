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

#include "metrics/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "common/error.hpp"

namespace biofed::metrics {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::string confusion_to_csv(const ConfusionMatrix& cm, const std::vector<std::string>& names) {
  if (names.size() != cm.num_classes()) throw Error(ErrorCode::kInvalidArgument, "one name per class required");
  std::ostringstream os;
  for (std::size_t j = 0; j < names.size(); ++j) os << (j ? "," : "") << csv_field(names[j]);
  os << '\n';
  for (std::size_t i = 0; i < cm.num_classes(); ++i) {
    for (std::size_t j = 0; j < cm.num_classes(); ++j) os << (j ? "," : "") << cm.at(i, j);
    os << '\n';
  }
  return os.str();
}

std::string confusion_to_svg(const ConfusionMatrix& cm, const std::vector<std::string>& names,
                             const std::string& title) {
  if (names.size() != cm.num_classes()) throw Error(ErrorCode::kInvalidArgument, "one name per class required");
  const std::size_t k = cm.num_classes();
  const int cell = k > 20 ? 18 : 32;
  const int margin = 110;
  const int size = margin + static_cast<int>(k) * cell + 20;
  std::uint64_t peak = 1;
  for (auto v : cm.counts()) peak = std::max(peak, v);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 30
     << "\" font-family=\"sans-serif\">\n";
  os << "<text x=\"10\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  os << "<text x=\"" << margin << "\" y=\"" << size + 20 << "\" font-size=\"11\">rows: true class, columns: "
     << "predicted class</text>\n";
  for (std::size_t i = 0; i < k; ++i) {
    const int y = margin + static_cast<int>(i) * cell;
    os << "<text x=\"" << margin - 4 << "\" y=\"" << y + cell / 2 + 4 << "\" font-size=\"9\" text-anchor=\"end\">"
       << xml_escape(names[i]) << "</text>\n";
    const int x = margin + static_cast<int>(i) * cell + cell / 2;
    os << "<text x=\"" << x << "\" y=\"" << margin - 4 << "\" font-size=\"9\" transform=\"rotate(-60 " << x << ' '
       << margin - 4 << ")\">" << xml_escape(names[i]) << "</text>\n";
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint64_t v = cm.at(i, j);
      const double t = static_cast<double>(v) / static_cast<double>(peak);
      const int shade = 255 - static_cast<int>(t * 200.0);
      const int x = margin + static_cast<int>(j) * cell, y = margin + static_cast<int>(i) * cell;
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
         << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#ccc\"/>";
      os << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" font-size=\"" << (cell > 20 ? 11 : 8)
         << "\" text-anchor=\"middle\">" << v << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

nlohmann::json metrics_to_json(const MetricsReport& r, const std::vector<std::string>& names) {
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& s = r.per_class[c];
    per_class.push_back({{"class", c < names.size() ? names[c] : std::to_string(c)},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support},
                         {"precision_undefined", s.precision_undefined},
                         {"recall_undefined", s.recall_undefined}});
  }
  return {{"num_classes", r.num_classes},   {"total", r.total},
          {"empty_evaluation", r.empty_evaluation}, {"accuracy", r.accuracy},
          {"macro_precision", r.macro_precision},   {"macro_recall", r.macro_recall},
          {"macro_f1", r.macro_f1},                 {"per_class", per_class}};
}

nlohmann::json confusion_to_json(const ConfusionMatrix& cm) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cm.num_classes(); ++i) {
    std::vector<std::uint64_t> row;
    for (std::size_t j = 0; j < cm.num_classes(); ++j) row.push_back(cm.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

ConfusionMatrix confusion_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw Error(ErrorCode::kValidation, "confusion matrix must be an array of rows");
  const std::size_t k = doc.size();
  std::vector<std::uint64_t> counts;
  for (const auto& row : doc) {
    if (!row.is_array() || row.size() != k) throw Error(ErrorCode::kValidation, "confusion matrix must be square");
    for (const auto& v : row) {
      if (!v.is_number_unsigned()) throw Error(ErrorCode::kValidation, "confusion counts must be non-negative");
      counts.push_back(v.get<std::uint64_t>());
    }
  }
  return ConfusionMatrix(k, std::move(counts));
}

nlohmann::json comparison_to_json(const ComparisonReport& r) {
  nlohmann::json deltas = nlohmann::json::object();
  for (const auto& d : r.deltas) {
    deltas[d.name] = {{"centralized", d.centralized}, {"federated", d.federated}, {"delta", d.delta}};
  }
  return {{"deltas", deltas}, {"threshold", r.threshold}, {"verdict", r.close ? "close" : "not close"}};
}

std::string metrics_table(const MetricsReport& r, const std::vector<std::string>& names) {
  std::ostringstream os;
  std::size_t width = 5;
  for (const auto& n : names) width = std::max(width, n.size());
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s %9s %9s %9s %8s\n", static_cast<int>(width), "class", "precision",
                "recall", "f1", "support");
  os << line;
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& s = r.per_class[c];
    std::snprintf(line, sizeof(line), "%-*s %9s %9s %9s %8llu\n", static_cast<int>(width),
                  c < names.size() ? names[c].c_str() : "?", fmt(s.precision).c_str(), fmt(s.recall).c_str(),
                  fmt(s.f1).c_str(), static_cast<unsigned long long>(s.support));
    os << line;
  }
  std::snprintf(line, sizeof(line), "%-*s %9s %9s %9s %8llu\n", static_cast<int>(width), "macro",
                fmt(r.macro_precision).c_str(), fmt(r.macro_recall).c_str(), fmt(r.macro_f1).c_str(),
                static_cast<unsigned long long>(r.total));
  os << line << "accuracy " << fmt(r.accuracy) << (r.empty_evaluation ? " (empty evaluation)" : "") << '\n';
  return os.str();
}

}  // namespace biofed::metrics
