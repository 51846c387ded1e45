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

#include "app/pipeline.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include "common/log.hpp"
#include "common/sha256.hpp"
#include "data/synthetic.hpp"
#include "fed/site_client.hpp"
#include "metrics/render.hpp"
#include "nn/checkpoint.hpp"
#include "transport/audit.hpp"
#include "transport/loopback.hpp"
#include "transport/socket.hpp"
#include "twin/registry.hpp"

namespace biofed::app {

using nlohmann::json;

void prepare_output_dir(const fs::path& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::kAlreadyExists, dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force) {
        throw Error(ErrorCode::kAlreadyExists, dir.string() + " is not empty; pass --force to overwrite");
      }
      for (const auto& entry : fs::directory_iterator(dir)) fs::remove_all(entry.path());
    }
  }
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

data::Dataset load_dataset(const RunConfig& cfg) {
  if (cfg.dataset.source == "synthetic") return data::synthesize(synthetic_spec(cfg));
  data::Dataset ds = data::ingest(cfg.dataset.manifest, {cfg.seed, cfg.dataset.test_fraction});
  return ds;
}

json dataset_info(const data::Dataset& ds) {
  const auto& m = ds.manifest;
  return json{{"classes", m.classes},
              {"sites", m.sites},
              {"image_shape", m.image_shape},
              {"normalization", {{"mean", m.normalization.mean}, {"std", m.normalization.stddev}}},
              {"num_samples", m.samples.size()},
              {"num_train", ds.train_indices().size()},
              {"num_test", ds.test_indices().size()},
              {"test_set_hash", ds.test_set_hash()}};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, path.string() + ": " + e.what());
  }
}

void write_model_metrics(const fs::path& run_dir, const std::string& name, const fed::RoundReport& final_report,
                         const std::string& test_set_hash, const std::vector<std::string>& class_names) {
  const fs::path dir = run_dir / "metrics";
  write_json(dir / (name + ".json"), json{{"model", name},
                                          {"round", final_report.round},
                                          {"test_set_hash", test_set_hash},
                                          {"eval_loss", final_report.eval_loss},
                                          {"metrics", metrics::metrics_to_json(final_report.metrics, class_names)},
                                          {"confusion", metrics::confusion_to_json(final_report.confusion)}});
  write_text(dir / (name + ".csv"), metrics::confusion_to_csv(final_report.confusion, class_names));
  write_text(dir / (name + ".svg"), metrics::confusion_to_svg(final_report.confusion, class_names, name));
}

namespace {

struct Prepared {
  data::Dataset dataset;
  nn::Architecture arch;
  nn::ModelParameters initial;
  std::string test_hash;
};

Prepared prepare(const RunConfig& cfg) {
  data::Dataset ds = load_dataset(cfg);
  nn::Architecture arch = nn::reference_cnn(ds.manifest.image_shape, ds.manifest.num_classes());
  nn::ModelParameters initial = nn::init_parameters(arch, cfg.seed);
  std::string hash = ds.test_set_hash();
  return {std::move(ds), std::move(arch), std::move(initial), std::move(hash)};
}

void start_run_dir(const RunConfig& cfg, const fs::path& out, bool force, const data::Dataset& ds) {
  prepare_output_dir(out, force);
  write_json(out / "config.json", config_to_json(cfg));
  write_json(out / "dataset.json", dataset_info(ds));
}

std::unique_ptr<transport::PrivacyAuditor> make_auditor(const RunConfig& cfg, const data::Dataset& ds) {
  auto auditor = std::make_unique<transport::PrivacyAuditor>();
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    auditor->add_sample(ds.images[i].values());
    auditor->add_sample(ds.raw[i].values());
  }
  if (cfg.dataset.source == "manifest") {
    const fs::path base = fs::path(cfg.dataset.manifest).parent_path();
    for (const auto& s : ds.manifest.samples) {
      const fs::path file = fs::path(s.ref).is_absolute() ? fs::path(s.ref) : base / s.ref;
      auditor->add_bytes(read_file_bytes(file.string()));
    }
  }
  return auditor;
}

fed::FederationResult centralized_phase(const RunConfig& cfg, const Prepared& p, const fs::path& out,
                                        const fed::Evaluator& evaluator) {
  const nn::LabeledSamples train = p.dataset.gather(p.dataset.train_indices());
  fed::DirectoryRecorder recorder(out / "centralized", false);
  fed::FederationResult result = fed::run_centralized(p.initial, train, cfg.federation.train,
                                                      cfg.effective_centralized_epochs(), evaluator, &recorder);
  write_model_metrics(out, "centralized", result.reports.back(), p.test_hash, p.dataset.manifest.classes);
  return result;
}

void finish_federated(const RunConfig& cfg, const Prepared& p, const fs::path& out,
                      const fed::FederationResult& result, RunSummary& summary) {
  const fed::RoundReport& last = result.reports.back();
  write_model_metrics(out, "federated", last, p.test_hash, p.dataset.manifest.classes);
  summary.rounds = result.reports.size();
  summary.federated_accuracy = last.metrics.accuracy;
  if (!cfg.twins) return;

  twin::TwinStore store(out / "twins.jsonl", p.dataset.manifest.classes, p.dataset.manifest.sites);
  const twin::ModelVersion version{last.round, to_hex(result.final_params.schema_hash()),
                                   "checkpoints/round-" + std::to_string(last.round) + ".bfck"};
  const std::vector<std::size_t> test = p.dataset.test_indices();
  const auto records =
      twin::register_samples(store, nn::Model{p.arch, result.final_params}, version, p.dataset, test);
  if (twin::retally(records, p.dataset.manifest.num_classes()) != last.confusion) {
    throw Error(ErrorCode::kValidation, "twin records do not re-tally to the evaluation confusion matrix");
  }
  summary.twin_records = records.size();
}

void compare_phase(const RunConfig& cfg, const Prepared& p, const fs::path& out, RunSummary& summary,
                   const fed::RoundReport& central, const fed::RoundReport& federated) {
  summary.comparison = metrics::compare_runs({central.metrics, p.test_hash}, {federated.metrics, p.test_hash},
                                             cfg.accuracy_threshold);
  write_json(out / "comparison.json", metrics::comparison_to_json(*summary.comparison));
}

}  // namespace

RunSummary simulate(const RunConfig& cfg, const fs::path& out, bool force) {
  cfg.federation.validate();
  Prepared p = prepare(cfg);
  start_run_dir(cfg, out, force, p.dataset);

  const auto specs = data::partition(p.dataset.manifest, cfg.federation.num_clients, cfg.strategy, cfg.seed);
  transport::LoopbackTransport loopback(cfg.max_frame_bytes);
  std::vector<std::shared_ptr<fed::SiteClient>> sites;
  for (const auto& spec : specs) {
    data::Shard shard = data::materialize(p.dataset, spec);
    auto site = std::make_shared<fed::SiteClient>(shard.client_id, p.arch, std::move(shard.data));
    sites.push_back(site);
    loopback.connect(site->id(), [site](const transport::Message& m) { return site->handle(m); });
  }
  std::unique_ptr<transport::PrivacyAuditor> auditor;
  if (cfg.audit) {
    auditor = make_auditor(cfg, p.dataset);
    loopback.set_observer(auditor->observer());
  }

  const fed::Evaluator evaluator(p.arch, p.dataset.test_set());
  RunSummary summary;
  fed::FederationResult federated;
  {
    fed::DirectoryRecorder recorder(out);
    federated = fed::run_federation(cfg.federation, loopback, p.initial, evaluator, &recorder);
  }
  for (const auto& id : loopback.clients()) {
    loopback.send(id, transport::Message{transport::kProtocolVersion, static_cast<std::uint32_t>(federated.reports.size()),
                                         transport::Shutdown{}});
  }
  if (auditor) summary.frames_audited = auditor->frames_inspected();
  finish_federated(cfg, p, out, federated, summary);

  if (cfg.centralized) {
    const fed::FederationResult central = centralized_phase(cfg, p, out, evaluator);
    summary.centralized_accuracy = central.reports.back().metrics.accuracy;
    compare_phase(cfg, p, out, summary, central.reports.back(), federated.reports.back());
  }
  return summary;
}

RunSummary centralized(const RunConfig& cfg, const fs::path& out, bool force) {
  Prepared p = prepare(cfg);
  start_run_dir(cfg, out, force, p.dataset);
  const fed::Evaluator evaluator(p.arch, p.dataset.test_set());
  const fed::FederationResult central = centralized_phase(cfg, p, out, evaluator);
  RunSummary summary;
  summary.rounds = central.reports.size();
  summary.centralized_accuracy = central.reports.back().metrics.accuracy;
  return summary;
}

std::vector<fs::path> write_shards(const RunConfig& cfg, const fs::path& out, bool force) {
  const data::Dataset ds = load_dataset(cfg);
  const auto specs = data::partition(ds.manifest, cfg.federation.num_clients, cfg.strategy, cfg.seed);
  prepare_output_dir(out, force);
  json dataset = config_to_json(cfg)["dataset"];
  if (cfg.dataset.source == "manifest") dataset["manifest"] = fs::absolute(cfg.dataset.manifest).string();
  std::vector<fs::path> paths;
  for (const auto& spec : specs) {
    std::vector<std::string> refs;
    for (std::size_t i : spec.indices) refs.push_back(ds.manifest.samples[i].ref);
    const fs::path path = out / "shards" / (spec.client_id + ".json");
    write_json(path, json{{"client_id", spec.client_id},
                          {"seed", cfg.seed},
                          {"strategy", data::strategy_name(cfg.strategy)},
                          {"num_clients", cfg.federation.num_clients},
                          {"dataset", dataset},
                          {"normalization",
                           {{"mean", ds.manifest.normalization.mean}, {"std", ds.manifest.normalization.stddev}}},
                          {"server", {{"host", cfg.host}, {"port", cfg.port}}},
                          {"max_frame_bytes", cfg.max_frame_bytes},
                          {"indices", spec.indices},
                          {"refs", refs}});
    paths.push_back(path);
  }
  write_json(out / "dataset.json", dataset_info(ds));
  return paths;
}

RunSummary serve(const RunConfig& cfg, const fs::path& out, bool force) {
  cfg.federation.validate();
  Prepared p = prepare(cfg);
  start_run_dir(cfg, out, force, p.dataset);

  transport::SocketServer server({cfg.host, cfg.port, cfg.max_frame_bytes, std::chrono::milliseconds(5000)});
  write_text(out / "port", std::to_string(server.port()) + "\n");
  log().info("listening on {}:{}", cfg.host, server.port());
  const auto deadline = transport::Clock::now() + std::chrono::milliseconds(cfg.accept_timeout_ms);
  const std::size_t joined = server.accept_clients(cfg.federation.num_clients, deadline);
  log().info("{} of {} clients joined", joined, cfg.federation.num_clients);

  std::unique_ptr<transport::PrivacyAuditor> auditor;
  if (cfg.audit) {
    auditor = make_auditor(cfg, p.dataset);
    server.set_observer(auditor->observer());
  }
  const fed::Evaluator evaluator(p.arch, p.dataset.test_set());
  RunSummary summary;
  fed::FederationResult federated;
  try {
    fed::DirectoryRecorder recorder(out);
    federated = fed::run_federation(cfg.federation, server, p.initial, evaluator, &recorder);
  } catch (...) {
    server.broadcast_shutdown(0);
    server.close();
    throw;
  }
  server.broadcast_shutdown(static_cast<std::uint32_t>(federated.reports.size()));
  server.close();
  if (auditor) summary.frames_audited = auditor->frames_inspected();
  finish_federated(cfg, p, out, federated, summary);
  return summary;
}

void run_site(const fs::path& shard_file, const ClientOverrides& overrides) {
  const json doc = read_json(shard_file);
  RunConfig cfg;
  std::string id;
  std::vector<std::size_t> indices;
  data::Normalization norm;
  try {
    json patch{{"seed", doc.at("seed")}, {"dataset", doc.at("dataset")}};
    cfg = apply_patch(default_config(), patch);
    id = doc.at("client_id").get<std::string>();
    indices = doc.at("indices").get<std::vector<std::size_t>>();
    norm.mean = doc.at("normalization").at("mean").get<std::vector<double>>();
    norm.stddev = doc.at("normalization").at("std").get<std::vector<double>>();
    cfg.host = doc.at("server").at("host").get<std::string>();
    cfg.port = doc.at("server").at("port").get<std::uint16_t>();
    cfg.max_frame_bytes = doc.at("max_frame_bytes").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, shard_file.string() + ": " + e.what());
  }

  const data::Dataset ds = load_dataset(cfg);
  if (ds.manifest.normalization != norm) {
    throw Error(ErrorCode::kValidation, shard_file.string() + ": normalization does not match the dataset");
  }
  const auto train = ds.train_indices();
  for (std::size_t i : indices) {
    if (!std::binary_search(train.begin(), train.end(), i)) {
      throw Error(ErrorCode::kValidation, shard_file.string() + ": index " + std::to_string(i) +
                                              " is not a train sample");
    }
  }
  data::Shard shard = data::materialize(ds, data::ShardSpec{id, indices});
  fed::SiteClient site(id, nn::reference_cnn(ds.manifest.image_shape, ds.manifest.num_classes()),
                       std::move(shard.data));

  transport::ClientOptions opts;
  opts.host = overrides.host.value_or(cfg.host);
  opts.port = overrides.port.value_or(cfg.port);
  opts.protocol_version = overrides.protocol_version.value_or(transport::kProtocolVersion);
  opts.max_frame_bytes = cfg.max_frame_bytes;
  if (overrides.connect_timeout_ms) opts.connect_timeout = std::chrono::milliseconds(*overrides.connect_timeout_ms);
  log().info("{} connecting to {}:{} with {} samples", id, opts.host, opts.port, site.num_examples());
  transport::run_client(opts, id, [&site](const transport::Message& m) { return site.handle(m); });
}

ReportSummary report(const fs::path& run_dir, double threshold, bool force) {
  const json info = read_json(run_dir / "dataset.json");
  const auto classes = info.at("classes").get<std::vector<std::string>>();
  struct Loaded {
    std::string name;
    metrics::ConfusionMatrix cm;
    std::string hash;
  };
  std::vector<Loaded> loaded;
  for (const char* name : {"centralized", "federated"}) {
    const fs::path path = run_dir / "metrics" / (std::string(name) + ".json");
    if (!fs::exists(path)) continue;
    const json doc = read_json(path);
    try {
      loaded.push_back({name, metrics::confusion_from_json(doc.at("confusion")),
                        doc.at("test_set_hash").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kValidation, path.string() + ": " + e.what());
    }
  }
  if (loaded.empty()) {
    throw Error(ErrorCode::kMissingFile, "no evaluated models under " + (run_dir / "metrics").string());
  }

  const fs::path dir = run_dir / "report";
  prepare_output_dir(dir, force);
  ReportSummary summary;
  std::ostringstream text;
  std::vector<metrics::EvaluatedRun> runs;
  for (const auto& l : loaded) {
    const metrics::MetricsReport m = metrics::derive_metrics(l.cm);
    write_text(dir / (l.name + ".csv"), metrics::confusion_to_csv(l.cm, classes));
    write_text(dir / (l.name + ".svg"), metrics::confusion_to_svg(l.cm, classes, l.name));
    text << "== " << l.name << " ==\n" << metrics::metrics_table(m, classes) << "\n";
    summary.models.push_back(l.name);
    runs.push_back({m, l.hash});
  }
  if (runs.size() == 2) {
    summary.comparison = metrics::compare_runs(runs[0], runs[1], threshold);
    write_json(dir / "comparison.json", metrics::comparison_to_json(*summary.comparison));
    text << "== comparison (federated - centralized) ==\n";
    char line[128];
    for (const auto& d : summary.comparison->deltas) {
      std::snprintf(line, sizeof line, "%-16s %8.4f %8.4f %+8.4f\n", d.name.c_str(), d.centralized, d.federated,
                    d.delta);
      text << line;
    }
    text << "verdict: " << (summary.comparison->close ? "close" : "not close") << " (threshold "
         << summary.comparison->threshold << ")\n";
  }
  summary.text = text.str();
  write_text(dir / "summary.txt", summary.text);
  return summary;
}

}  // namespace biofed::app
