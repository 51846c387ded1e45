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

#include "twin/registry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "common/log.hpp"
#include "metrics/evaluate.hpp"

namespace biofed::twin {

namespace fs = std::filesystem;

nlohmann::json record_to_json(const TwinRecord& r) {
  nlohmann::json doc{{"record_id", r.record_id},
                     {"sample_ref", r.sample_ref},
                     {"predicted_index", r.predicted_index},
                     {"predicted_class", r.predicted_class},
                     {"probabilities", r.probabilities},
                     {"site", r.site},
                     {"model_version",
                      {{"round", r.version.round},
                       {"schema_hash", r.version.schema_hash},
                       {"checkpoint", r.version.checkpoint}}},
                     {"timestamp", r.timestamp}};
  if (r.true_index) doc["true_index"] = *r.true_index;
  return doc;
}

TwinRecord record_from_json(const nlohmann::json& doc) {
  try {
    TwinRecord r;
    r.record_id = doc.at("record_id").get<std::uint64_t>();
    r.sample_ref = doc.at("sample_ref").get<std::string>();
    r.predicted_index = doc.at("predicted_index").get<std::uint32_t>();
    r.predicted_class = doc.at("predicted_class").get<std::string>();
    r.probabilities = doc.at("probabilities").get<std::vector<double>>();
    r.site = doc.at("site").get<std::string>();
    const auto& v = doc.at("model_version");
    r.version.round = v.at("round").get<std::uint32_t>();
    r.version.schema_hash = v.at("schema_hash").get<std::string>();
    r.version.checkpoint = v.at("checkpoint").get<std::string>();
    r.timestamp = doc.at("timestamp").get<std::string>();
    if (doc.contains("true_index")) r.true_index = doc.at("true_index").get<std::uint32_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("malformed twin record: ") + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TwinStore::TwinStore(fs::path path, std::vector<std::string> classes, std::vector<std::string> sites,
                     TimestampFn clock)
    : path_(std::move(path)), classes_(std::move(classes)), sites_(std::move(sites)), clock_(std::move(clock)) {
  if (classes_.empty()) throw Error(ErrorCode::kInvalidArgument, "twin store needs a class vocabulary");
  if (path_.empty() || !fs::exists(path_)) return;
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path_.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kValidation, path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    TwinRecord r = record_from_json(doc);
    if (!records_.empty() && r.record_id <= records_.back().record_id) {
      throw Error(ErrorCode::kValidation, path_.string() + ":" + std::to_string(line_no) +
                                              ": record ids are not increasing");
    }
    records_.push_back(std::move(r));
    index(records_.size() - 1);
  }
}

void TwinStore::validate(const TwinRecord& r) const {
  const std::size_t k = classes_.size();
  if (r.probabilities.size() != k) {
    throw Error(ErrorCode::kValidation, "probability vector has " + std::to_string(r.probabilities.size()) +
                                            " entries, expected " + std::to_string(k));
  }
  double sum = 0.0;
  for (double p : r.probabilities) {
    if (!std::isfinite(p) || p < 0.0) throw Error(ErrorCode::kValidation, "probabilities must be finite and >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::kValidation, "probabilities sum to " + std::to_string(sum));
  }
  const auto argmax = static_cast<std::uint32_t>(
      std::max_element(r.probabilities.begin(), r.probabilities.end()) - r.probabilities.begin());
  if (r.predicted_index != argmax) {
    throw Error(ErrorCode::kValidation, "predicted index " + std::to_string(r.predicted_index) +
                                            " is not the argmax " + std::to_string(argmax));
  }
  if (r.predicted_class != classes_[argmax]) {
    throw Error(ErrorCode::kValidation, "predicted class " + r.predicted_class + " does not name index " +
                                            std::to_string(argmax));
  }
  if (r.true_index && *r.true_index >= k) {
    throw Error(ErrorCode::kLabelOutOfRange, "true index " + std::to_string(*r.true_index));
  }
  if (std::find(sites_.begin(), sites_.end(), r.site) == sites_.end()) {
    throw Error(ErrorCode::kValidation, "unknown site '" + r.site + "'");
  }
  if (r.version.checkpoint.empty() || !fs::exists(resolve_checkpoint(r.version.checkpoint))) {
    throw Error(ErrorCode::kMissingFile, "model checkpoint '" + r.version.checkpoint + "' is not persisted");
  }
  if (seen_.count({r.sample_ref, r.version.round, r.version.schema_hash})) {
    throw Error(ErrorCode::kDuplicate, "sample " + r.sample_ref + " already registered for round " +
                                           std::to_string(r.version.round));
  }
}

fs::path TwinStore::resolve_checkpoint(const std::string& checkpoint) const {
  fs::path p(checkpoint);
  if (p.is_relative() && !path_.empty()) return path_.parent_path() / p;
  return p;
}

void TwinStore::index(std::size_t position) {
  const TwinRecord& r = records_[position];
  by_class_[r.predicted_class].push_back(position);
  by_site_[r.site].push_back(position);
  seen_[{r.sample_ref, r.version.round, r.version.schema_hash}] = r.record_id;
}

const TwinRecord& TwinStore::append(TwinRecord record) {
  validate(record);
  record.record_id = records_.empty() ? 1 : records_.back().record_id + 1;
  record.timestamp = clock_();
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << record_to_json(record).dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path_.string());
  }
  records_.push_back(std::move(record));
  index(records_.size() - 1);
  return records_.back();
}

std::vector<TwinRecord> TwinStore::query(const TwinFilter& f) const {
  if (f.class_name && std::find(classes_.begin(), classes_.end(), *f.class_name) == classes_.end()) {
    throw Error(ErrorCode::kUnknownFilter, "unknown class '" + *f.class_name + "'");
  }
  if (f.site && std::find(sites_.begin(), sites_.end(), *f.site) == sites_.end()) {
    throw Error(ErrorCode::kUnknownFilter, "unknown site '" + *f.site + "'");
  }
  static const std::vector<std::size_t> kNone;
  const std::vector<std::size_t>* candidates = nullptr;
  std::vector<std::size_t> all;
  if (f.class_name) {
    auto it = by_class_.find(*f.class_name);
    candidates = it == by_class_.end() ? &kNone : &it->second;
  } else if (f.site) {
    auto it = by_site_.find(*f.site);
    candidates = it == by_site_.end() ? &kNone : &it->second;
  } else {
    all.resize(records_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    candidates = &all;
  }
  std::vector<TwinRecord> out;
  for (std::size_t pos : *candidates) {
    const TwinRecord& r = records_[pos];
    if (f.site && r.site != *f.site) continue;
    if (f.round && r.version.round != *f.round) continue;
    if (f.schema_hash && r.version.schema_hash != *f.schema_hash) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<TwinRecord> register_samples(TwinStore& store, const nn::Model& model, const ModelVersion& version,
                                         const data::Dataset& dataset, std::span<const std::size_t> indices) {
  if (indices.empty()) return {};
  if (nn::num_classes(model.arch) != store.classes().size()) {
    throw Error(ErrorCode::kShapeMismatch, "model has " + std::to_string(nn::num_classes(model.arch)) +
                                               " outputs, store knows " + std::to_string(store.classes().size()) +
                                               " classes");
  }
  if (!fs::exists(store.resolve_checkpoint(version.checkpoint))) {
    throw Error(ErrorCode::kMissingFile, "model checkpoint '" + version.checkpoint + "' is not persisted");
  }
  for (std::size_t i : indices) {
    if (i >= dataset.manifest.samples.size()) {
      throw Error(ErrorCode::kInvalidArgument, "sample index " + std::to_string(i) + " out of range");
    }
  }
  const nn::LabeledSamples batch = dataset.gather(indices);
  const metrics::Evaluation ev = metrics::evaluate_model(model, batch);
  const std::size_t k = store.classes().size();
  std::vector<TwinRecord> out;
  out.reserve(indices.size());
  for (std::size_t s = 0; s < indices.size(); ++s) {
    const data::Sample& sample = dataset.manifest.samples[indices[s]];
    TwinRecord r;
    r.sample_ref = sample.ref;
    r.probabilities.assign(ev.probabilities.begin() + static_cast<std::ptrdiff_t>(s * k),
                           ev.probabilities.begin() + static_cast<std::ptrdiff_t>((s + 1) * k));
    r.predicted_index = ev.predictions[s];
    r.predicted_class = store.classes()[r.predicted_index];
    r.site = sample.site;
    r.true_index = sample.label;
    r.version = version;
    out.push_back(store.append(std::move(r)));
  }
  log().info("registered {} twin records for round {}", out.size(), version.round);
  return out;
}

metrics::ConfusionMatrix retally(const std::vector<TwinRecord>& records, std::size_t num_classes) {
  metrics::ConfusionMatrix cm(num_classes);
  for (const auto& r : records) {
    if (!r.true_index) {
      throw Error(ErrorCode::kValidation, "record " + std::to_string(r.record_id) + " has no ground truth");
    }
    if (*r.true_index >= num_classes || r.predicted_index >= num_classes) {
      throw Error(ErrorCode::kLabelOutOfRange, "record " + std::to_string(r.record_id) + " is outside " +
                                                   std::to_string(num_classes) + " classes");
    }
    cm.add(*r.true_index, r.predicted_index);
  }
  return cm;
}

std::string records_table(const std::vector<TwinRecord>& records) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-28s %-16s %-7s %-6s %s\n", "id", "sample", "class", "p", "site",
                "round");
  out << line;
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%-6llu %-28s %-16s %-7.4f %-6s %u\n",
                  static_cast<unsigned long long>(r.record_id), r.sample_ref.c_str(), r.predicted_class.c_str(),
                  r.probabilities[r.predicted_index], r.site.c_str(), r.version.round);
    out << line;
  }
  return out.str();
}

}  // namespace biofed::twin
