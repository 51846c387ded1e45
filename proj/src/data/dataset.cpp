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

#include "data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "common/rng.hpp"
#include "common/sha256.hpp"

namespace biofed::data {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t DatasetManifest::class_index(const std::string& name) const {
  const auto it = std::find(classes.begin(), classes.end(), name);
  if (it == classes.end()) throw Error(ErrorCode::kValidation, "unknown class " + name);
  return static_cast<std::size_t>(it - classes.begin());
}

bool DatasetManifest::has_site(const std::string& site) const {
  return std::find(sites.begin(), sites.end(), site) != sites.end();
}

DatasetManifest parse_manifest(const json& doc) {
  std::vector<std::string> problems;
  DatasetManifest m;
  if (!doc.is_object()) throw Error(ErrorCode::kValidation, "manifest must be a JSON object");

  if (!doc.contains("classes") || !doc["classes"].is_array() || doc["classes"].empty()) {
    problems.push_back("classes: must be a non-empty array of strings");
  } else {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc["classes"].size(); ++i) {
      const auto& c = doc["classes"][i];
      if (!c.is_string() || c.get<std::string>().empty()) {
        problems.push_back("classes[" + std::to_string(i) + "]: must be a non-empty string");
      } else if (!seen.insert(c.get<std::string>()).second) {
        problems.push_back("classes[" + std::to_string(i) + "]: duplicate class " + c.get<std::string>());
      } else {
        m.classes.push_back(c.get<std::string>());
      }
    }
  }

  if (!doc.contains("image_shape") || !doc["image_shape"].is_array() || doc["image_shape"].size() != 3) {
    problems.push_back("image_shape: must be [C, H, W]");
  } else {
    for (const auto& d : doc["image_shape"]) {
      if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) {
        problems.push_back("image_shape: dimensions must be positive integers");
        break;
      }
      m.image_shape.push_back(d.get<std::size_t>());
    }
    if (m.image_shape.size() == 3 && m.image_shape[0] != 1 && m.image_shape[0] != 3) {
      problems.push_back("image_shape: channel count must be 1 or 3");
    }
  }

  if (doc.contains("sites")) {
    if (!doc["sites"].is_array() || doc["sites"].empty()) {
      problems.push_back("sites: must be a non-empty array of strings");
    } else {
      for (const auto& s : doc["sites"]) {
        if (s.is_string()) m.sites.push_back(s.get<std::string>());
        else problems.push_back("sites: entries must be strings");
      }
    }
  }
  const bool declared_sites = !m.sites.empty();

  if (!doc.contains("samples") || !doc["samples"].is_array() || doc["samples"].empty()) {
    problems.push_back("samples: must be a non-empty array");
  } else {
    std::set<std::string> paths;
    for (std::size_t i = 0; i < doc["samples"].size(); ++i) {
      const auto& s = doc["samples"][i];
      const std::string where = "samples[" + std::to_string(i) + "]";
      if (!s.is_object()) {
        problems.push_back(where + ": must be an object");
        continue;
      }
      Sample sample;
      if (!s.contains("path") || !s["path"].is_string() || s["path"].get<std::string>().empty()) {
        problems.push_back(where + ".path: must be a non-empty string");
        continue;
      }
      sample.ref = s["path"].get<std::string>();
      if (!paths.insert(sample.ref).second) problems.push_back(where + ".path: duplicate path " + sample.ref);
      const json cls = s.value("class", json());
      if (cls.is_string()) {
        const auto it = std::find(m.classes.begin(), m.classes.end(), cls.get<std::string>());
        if (it == m.classes.end()) problems.push_back(where + ".class: unknown class " + cls.get<std::string>());
        else sample.label = static_cast<std::uint32_t>(it - m.classes.begin());
      } else if (cls.is_number_unsigned() && cls.get<std::size_t>() < m.classes.size()) {
        sample.label = cls.get<std::uint32_t>();
      } else {
        problems.push_back(where + ".class: must be a class name or an index in [0, K)");
      }
      sample.site = s.value("site", std::string());
      if (sample.site.empty()) {
        problems.push_back(where + ".site: must be a non-empty string");
      } else if (declared_sites && !m.has_site(sample.site)) {
        problems.push_back(where + ".site: " + sample.site + " is not in the declared site vocabulary");
      } else if (!declared_sites && !m.has_site(sample.site)) {
        m.sites.push_back(sample.site);
      }
      m.samples.push_back(std::move(sample));
    }
  }

  if (doc.contains("normalization")) {
    const auto& n = doc["normalization"];
    try {
      m.normalization.mean = n.at("mean").get<std::vector<double>>();
      m.normalization.stddev = n.at("std").get<std::vector<double>>();
    } catch (const json::exception&) {
      problems.push_back("normalization: must be {mean: [..], std: [..]}");
    }
    if (!m.image_shape.empty() && (m.normalization.mean.size() != m.image_shape[0] ||
                                   m.normalization.stddev.size() != m.image_shape[0])) {
      problems.push_back("normalization: needs one mean and std per channel");
    }
    for (double sd : m.normalization.stddev) {
      if (!(sd > 0.0)) problems.push_back("normalization.std: values must be positive");
    }
  }

  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(ErrorCode::kValidation, msg);
  }
  return m;
}

json manifest_to_json(const DatasetManifest& m) {
  json samples = json::array();
  for (const auto& s : m.samples) {
    samples.push_back({{"path", s.ref},
                       {"class", m.classes.at(s.label)},
                       {"site", s.site},
                       {"split", s.split == Split::kTrain ? "train" : "test"}});
  }
  json doc{{"classes", m.classes}, {"sites", m.sites}, {"image_shape", m.image_shape}, {"samples", samples}};
  if (!m.normalization.mean.empty()) {
    doc["normalization"] = {{"mean", m.normalization.mean}, {"std", m.normalization.stddev}};
  }
  return doc;
}

void assign_split(DatasetManifest& manifest, std::uint64_t seed, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kValidation, "test_fraction must be in (0, 1)");
  }
  const std::uint64_t split_seed = derive_seed(seed, "split");
  std::vector<std::vector<std::size_t>> by_class(manifest.num_classes());
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) by_class.at(manifest.samples[i].label).push_back(i);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.size() < 2) {
      throw Error(ErrorCode::kClassWithoutTestSamples,
                  "class " + manifest.classes[c] + " has " + std::to_string(members.size()) +
                      " sample(s); at least one train and one test sample are required");
    }
    std::vector<std::pair<std::uint64_t, std::size_t>> ranked;
    for (std::size_t i : members) ranked.emplace_back(mix64(split_seed ^ fnv1a64(manifest.samples[i].ref)), i);
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : manifest.samples[a.second].ref < manifest.samples[b.second].ref;
    });
    const auto wanted = static_cast<std::size_t>(std::llround(static_cast<double>(members.size()) * test_fraction));
    const std::size_t n_test = std::clamp<std::size_t>(wanted, 1, members.size() - 1);
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      manifest.samples[ranked[r].second].split = r < n_test ? Split::kTest : Split::kTrain;
    }
  }
}

std::vector<std::size_t> Dataset::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    if (manifest.samples[i].split == split) out.push_back(i);
  }
  return out;
}

nn::LabeledSamples Dataset::gather(std::span<const std::size_t> idx) const {
  nn::LabeledSamples out;
  out.sample_shape = manifest.image_shape;
  out.pixels.reserve(idx.size() * out.sample_size());
  for (std::size_t i : idx) out.append(images.at(i).values(), manifest.samples.at(i).label);
  return out;
}

std::string Dataset::test_set_hash() const {
  ByteWriter w;
  for (std::size_t i : test_indices()) {
    w.str16(manifest.samples[i].ref);
    w.u32(manifest.samples[i].label);
  }
  return to_hex(sha256(w.bytes()));
}

Normalization compute_normalization(const DatasetManifest& manifest, const std::vector<nn::Tensor>& raw) {
  const std::size_t channels = manifest.image_shape.at(0);
  const std::size_t plane = manifest.image_shape.at(1) * manifest.image_shape.at(2);
  std::vector<double> sum(channels, 0.0), sq(channels, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    if (manifest.samples[i].split != Split::kTrain) continue;
    ++count;
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t p = 0; p < plane; ++p) {
        const double v = raw.at(i)[c * plane + p];
        sum[c] += v;
        sq[c] += v * v;
      }
    }
  }
  if (count == 0) throw Error(ErrorCode::kTooFewSamples, "no train samples to normalize with");
  Normalization norm;
  const double n = static_cast<double>(count * plane);
  for (std::size_t c = 0; c < channels; ++c) {
    const double mean = sum[c] / n;
    const double var = std::max(0.0, sq[c] / n - mean * mean);
    norm.mean.push_back(mean);
    norm.stddev.push_back(var > 1e-12 ? std::sqrt(var) : 1.0);
  }
  return norm;
}

Dataset build_dataset(DatasetManifest manifest, std::vector<nn::Tensor> raw) {
  if (raw.size() != manifest.samples.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one raw image per manifest sample is required");
  }
  if (manifest.normalization.mean.empty()) manifest.normalization = compute_normalization(manifest, raw);
  Dataset ds;
  ds.images.reserve(raw.size());
  const auto& shape = manifest.image_shape;
  for (const auto& r : raw) {
    if (r.shape() != shape) throw Error(ErrorCode::kShapeMismatch, "raw image does not have the manifest shape");
    RawImage img{shape[0], shape[1], shape[2], std::vector<float>(r.values().begin(), r.values().end())};
    ds.images.push_back(preprocess(img, shape, manifest.normalization));
  }
  ds.manifest = std::move(manifest);
  ds.raw = std::move(raw);
  return ds;
}

Dataset ingest(const std::string& manifest_path, const IngestOptions& options) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::kMissingFile, manifest_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kValidation, manifest_path + ": " + e.what());
  }
  DatasetManifest manifest = parse_manifest(doc);
  assign_split(manifest, options.seed, options.test_fraction);

  const fs::path base = fs::path(manifest_path).parent_path();
  const Normalization identity = Normalization::identity(manifest.image_shape[0]);
  std::vector<nn::Tensor> raw;
  raw.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) {
    const fs::path p = fs::path(s.ref).is_absolute() ? fs::path(s.ref) : base / s.ref;
    if (!fs::exists(p)) throw Error(ErrorCode::kMissingFile, p.string());
    try {
      raw.push_back(preprocess(read_file_bytes(p.string()), manifest.image_shape, identity));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUnsupportedFormat || e.code() == ErrorCode::kCorruptImage) {
        throw Error(e.code(), p.string() + ": undecodable image (" + e.what() + ")");
      }
      throw;
    }
  }
  return build_dataset(std::move(manifest), std::move(raw));
}

}  // namespace biofed::data
