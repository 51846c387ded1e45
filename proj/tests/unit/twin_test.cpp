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

#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "common/rng.hpp"
#include "common/sha256.hpp"
#include "data/synthetic.hpp"
#include "metrics/evaluate.hpp"
#include "nn/checkpoint.hpp"
#include "nn/train.hpp"
#include "support/test_util.hpp"
#include "twin/registry.hpp"

namespace biofed::twin {
namespace {

using biofed::testing::TempDir;

const std::vector<std::string> kClasses{"a", "b", "c"};

std::string fixed_clock() { return "2026-01-02T03:04:05Z"; }

struct StoreFixture {
  TempDir dir;
  ModelVersion version{1, std::string(64, 'e'), "round-1.bfck"};

  StoreFixture() {
    std::ofstream(dir / "round-1.bfck") << "x";
    std::ofstream(dir / "round-2.bfck") << "x";
  }
  std::filesystem::path store_path() const { return dir / "twins.jsonl"; }
  TwinStore open() const { return TwinStore(store_path(), kClasses, data::default_sites(), fixed_clock); }
};

TwinRecord make(const std::string& ref, std::uint32_t pred, const std::string& site,
                const ModelVersion& version) {
  TwinRecord r;
  r.sample_ref = ref;
  r.predicted_index = pred;
  r.predicted_class = kClasses[pred];
  r.probabilities = {0.1, 0.1, 0.1};
  r.probabilities[pred] = 0.8;
  r.site = site;
  r.true_index = pred;
  r.version = version;
  return r;
}

TEST(TwinStoreTest, EmptyStoreQueriesEmpty) {
  StoreFixture f;
  const TwinStore s = f.open();
  EXPECT_TRUE(s.query({}).empty());
  EXPECT_EQ(s.size(), 0u);
}

TEST(TwinStoreTest, AppendAssignsIdsAndTimestamps) {
  StoreFixture f;
  TwinStore s = f.open();
  const auto& r1 = s.append(make("s/1", 0, "blood", f.version));
  EXPECT_EQ(r1.record_id, 1u);
  EXPECT_EQ(r1.timestamp, "2026-01-02T03:04:05Z");
  EXPECT_EQ(s.append(make("s/2", 2, "skin", f.version)).record_id, 2u);
}

TEST(TwinStoreTest, ValidationRejections) {
  StoreFixture f;
  TwinStore s = f.open();
  auto bad = make("s/1", 1, "blood", f.version);
  bad.probabilities = {0.2, 0.3};
  EXPECT_ERROR_CODE(s.append(bad), ErrorCode::kValidation);
  bad = make("s/1", 1, "blood", f.version);
  bad.probabilities = {0.2, 0.7, 0.2};
  EXPECT_ERROR_CODE(s.append(bad), ErrorCode::kValidation);
  bad = make("s/1", 1, "blood", f.version);
  bad.probabilities = {0.5, -0.1, 0.6};
  EXPECT_ERROR_CODE(s.append(bad), ErrorCode::kValidation);
  bad = make("s/1", 1, "blood", f.version);
  bad.predicted_index = 0;
  EXPECT_ERROR_CODE(s.append(bad), ErrorCode::kValidation);
  bad = make("s/1", 1, "blood", f.version);
  bad.predicted_class = "c";
  EXPECT_ERROR_CODE(s.append(bad), ErrorCode::kValidation);
  bad = make("s/1", 1, "soil", f.version);
  EXPECT_ERROR_CODE(s.append(bad), ErrorCode::kValidation);
  bad = make("s/1", 1, "blood", {1, "h", "round-9.bfck"});
  EXPECT_ERROR_CODE(s.append(bad), ErrorCode::kMissingFile);
  EXPECT_EQ(s.size(), 0u);

  s.append(make("s/1", 1, "blood", f.version));
  EXPECT_ERROR_CODE(s.append(make("s/1", 2, "blood", f.version)), ErrorCode::kDuplicate);
  // The same sample under another model version is a new twin state.
  s.append(make("s/1", 2, "blood", {2, std::string(64, 'e'), "round-2.bfck"}));
  EXPECT_EQ(s.size(), 2u);
}

TEST(TwinStoreTest, FileRoundTripAndReopen) {
  StoreFixture f;
  Rng rng(4);
  {
    TwinStore s = f.open();
    for (int i = 0; i < 30; ++i) {
      auto r = make("s/" + std::to_string(i), static_cast<std::uint32_t>(rng.below(3)),
                    data::default_sites()[rng.below(3)], f.version);
      // Awkward doubles exercise exact text round trip.
      const double x = rng.uniform(0.0, 0.05);
      r.probabilities.assign(3, x);
      r.probabilities[r.predicted_index] = 1.0 - 2.0 * x;
      if (i % 4 == 0) r.true_index.reset();
      s.append(r);
    }
  }
  const TwinStore again = f.open();
  ASSERT_EQ(again.size(), 30u);
  TwinStore fresh = f.open();
  EXPECT_EQ(fresh.records(), again.records());
  for (const auto& r : again.records()) EXPECT_EQ(record_from_json(record_to_json(r)), r);
  EXPECT_EQ(fresh.append(make("s/new", 0, "urine", f.version)).record_id, 31u);
}

TEST(TwinStoreTest, CorruptFileRejected) {
  StoreFixture f;
  std::ofstream(f.store_path()) << "{not json\n";
  EXPECT_ERROR_CODE(f.open(), ErrorCode::kValidation);
}

TEST(TwinQueryTest, FiltersPartitionTheStore) {
  StoreFixture f;
  TwinStore s = f.open();
  Rng rng(9);
  for (int i = 0; i < 60; ++i) {
    s.append(make("s/" + std::to_string(i), static_cast<std::uint32_t>(rng.below(3)),
                  data::default_sites()[rng.below(3)], f.version));
  }
  std::set<std::uint64_t> ids;
  std::size_t total = 0;
  for (const auto& c : kClasses) {
    const auto rs = s.query({c, {}, {}, {}});
    for (const auto& r : rs) {
      EXPECT_EQ(r.predicted_class, c);
      ids.insert(r.record_id);
    }
    EXPECT_TRUE(std::is_sorted(rs.begin(), rs.end(),
                               [](const auto& a, const auto& b) { return a.record_id < b.record_id; }));
    total += rs.size();
  }
  EXPECT_EQ(total, 60u);
  EXPECT_EQ(ids.size(), 60u);
  for (const auto& r : s.query({{}, "blood", {}, {}})) EXPECT_EQ(r.site, "blood");
  EXPECT_EQ(s.query({{}, {}, 1u, {}}).size(), 60u);
  EXPECT_TRUE(s.query({{}, {}, 2u, {}}).empty());
  EXPECT_TRUE(s.query({{}, {}, {}, "other"}).empty());
  EXPECT_ERROR_CODE(s.query({"zebra", {}, {}, {}}), ErrorCode::kUnknownFilter);
  EXPECT_ERROR_CODE(s.query({{}, "soil", {}, {}}), ErrorCode::kUnknownFilter);
}

TEST(TwinRegistryTest, RetallyReproducesEvaluation) {
  TempDir dir;
  const data::Dataset ds = data::synthesize({4, 15, {1, 8, 8}, 3, 0.3, 0.3});
  nn::Model model{nn::reference_cnn({1, 8, 8}, 4), {}};
  model.params = nn::init_parameters(model.arch, 3);
  model.params = nn::train_local(model, ds.gather(ds.train_indices()), {0.05, 8, 2, 3}).params;
  nn::save_checkpoint((dir / "round-2.bfck").string(), model.params);
  const ModelVersion version{2, to_hex(model.params.schema_hash()), "round-2.bfck"};

  TwinStore store(dir / "twins.jsonl", ds.manifest.classes, ds.manifest.sites);
  const auto test = ds.test_indices();
  const auto recs = register_samples(store, model, version, ds, test);
  ASSERT_EQ(recs.size(), test.size());
  const auto ev = metrics::evaluate_model(model, ds.test_set());
  EXPECT_EQ(retally(store.records(), 4), ev.confusion);
  for (std::size_t j = 0; j < recs.size(); ++j) {
    EXPECT_EQ(recs[j].sample_ref, ds.manifest.samples[test[j]].ref);
    EXPECT_EQ(recs[j].predicted_index, ev.predictions[j]);
    EXPECT_EQ(recs[j].site, ds.manifest.samples[test[j]].site);
  }
  EXPECT_ERROR_CODE(register_samples(store, model, version, ds, test), ErrorCode::kDuplicate);
  EXPECT_NE(records_table(recs).find(recs[0].sample_ref), std::string::npos);
}

}  // namespace
}  // namespace biofed::twin
