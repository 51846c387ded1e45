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

#ifndef BIOFED_DATA_DATASET_HPP_
#define BIOFED_DATA_DATASET_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "data/image.hpp"
#include "nn/train.hpp"

namespace biofed::data {

enum class Split : std::uint8_t { kTrain, kTest };

struct Sample {
  std::string ref;  // file path (relative to the manifest) or synthetic id
  std::uint32_t label = 0;
  std::string site;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<std::string> classes;
  std::vector<std::string> sites;
  nn::Shape image_shape;
  std::vector<Sample> samples;
  // Empty until computed from the train split or read from the file.
  Normalization normalization;

  std::size_t num_classes() const { return classes.size(); }
  std::size_t class_index(const std::string& name) const;
  bool has_site(const std::string& site) const;
};

inline const std::vector<std::string>& default_sites() {
  static const std::vector<std::string> kSites{"blood", "urine", "skin"};
  return kSites;
}

// Parses and validates {classes, image_shape, samples: [{path, class, site}]}
// plus the optional "sites" vocabulary and "normalization" block. Sample
// "class" may be a class name or an index.
DatasetManifest parse_manifest(const nlohmann::json& doc);
nlohmann::json manifest_to_json(const DatasetManifest& manifest);

// Stratified, seed-derived split: inside each class, samples are ranked by a
// hash of (seed, ref) and the lowest max(1, round(n * test_fraction)) go to
// test. Classes that cannot keep at least one sample on each side are
// rejected with kClassWithoutTestSamples.
void assign_split(DatasetManifest& manifest, std::uint64_t seed, double test_fraction);

// A manifest with its decoded images. `raw` holds target-shaped images in
// [0, 1]; `images` the standardized tensors fed to the model.
struct Dataset {
  DatasetManifest manifest;
  std::vector<nn::Tensor> raw;
  std::vector<nn::Tensor> images;

  std::vector<std::size_t> indices(Split split) const;
  std::vector<std::size_t> train_indices() const { return indices(Split::kTrain); }
  std::vector<std::size_t> test_indices() const { return indices(Split::kTest); }
  nn::LabeledSamples gather(std::span<const std::size_t> indices) const;
  nn::LabeledSamples test_set() const { return gather(test_indices()); }
  // SHA-256 over the ordered (ref, label) list of the test split.
  std::string test_set_hash() const;
};

// Per-channel mean and population stddev over the train split of `raw`.
Normalization compute_normalization(const DatasetManifest& manifest, const std::vector<nn::Tensor>& raw);

// Fills in normalization if it is still empty, then standardizes every raw
// image into `images`.
Dataset build_dataset(DatasetManifest manifest, std::vector<nn::Tensor> raw);

struct IngestOptions {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
};

// Reads the manifest file, checks every referenced image exists and decodes,
// splits and preprocesses.
Dataset ingest(const std::string& manifest_path, const IngestOptions& options);

}  // namespace biofed::data

#endif  // BIOFED_DATA_DATASET_HPP_
