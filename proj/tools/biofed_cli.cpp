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

// Command-line front end. Links only against the C interface.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "biofed/biofed.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitNotClose = 4;

int exit_code_for(biofed_status status) {
  switch (status) {
    case BIOFED_OK: return kExitOk;
    case BIOFED_ERR_INVALID_ARGUMENT:
    case BIOFED_ERR_VALIDATION:
    case BIOFED_ERR_ALREADY_EXISTS:
    case BIOFED_ERR_MISSING_FILE:
    case BIOFED_ERR_DATA: return kExitValidation;
    case BIOFED_ERR_NOT_CLOSE: return kExitNotClose;
    default: return kExitRuntime;
  }
}

int report_failure(biofed_status status) {
  std::fprintf(stderr, "biofed: error [%s]: %s\n", biofed_last_error_code(), biofed_last_error());
  return exit_code_for(status);
}

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> clients;
  std::optional<std::uint64_t> rounds;
  std::optional<std::string> strategy;
  std::optional<std::string> manifest;
  std::optional<std::string> host;
  std::optional<std::uint64_t> port;
  std::string out = "biofed-run";
  bool force = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--seed", f.seed, "Seed for every random stream");
  cmd->add_option("--clients", f.clients, "Number of clients (also sets clients_required)");
  cmd->add_option("--rounds", f.rounds, "Federated rounds");
  cmd->add_option("--strategy", f.strategy, "Partition strategy")->check(CLI::IsMember({"iid", "label-skew"}));
  cmd->add_option("--manifest", f.manifest, "Dataset manifest (default: synthetic data)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--force", f.force, "Replace a non-empty output directory");
}

// Loads the file (or defaults), then applies flag overrides as one patch.
biofed_status build_config(const RunFlags& f, biofed_config** cfg) {
  biofed_status st = f.config.empty() ? biofed_config_default(cfg) : biofed_config_load(f.config.c_str(), cfg);
  if (st != BIOFED_OK) return st;
  nlohmann::json patch = nlohmann::json::object();
  if (f.seed) patch["seed"] = *f.seed;
  if (f.clients) {
    patch["federation"]["num_clients"] = *f.clients;
    patch["federation"]["clients_required"] = *f.clients;
  }
  if (f.rounds) patch["federation"]["rounds"] = *f.rounds;
  if (f.strategy) patch["partition"]["strategy"] = *f.strategy;
  if (f.manifest) {
    patch["dataset"]["source"] = "manifest";
    patch["dataset"]["manifest"] = *f.manifest;
  }
  if (f.host) patch["server"]["host"] = *f.host;
  if (f.port) patch["server"]["port"] = *f.port;
  if (patch.empty()) return BIOFED_OK;
  return biofed_config_patch(*cfg, patch.dump().c_str());
}

void print_summary(const biofed_run_summary& s) {
  std::printf("rounds: %u\n", s.rounds);
  if (s.federated_accuracy >= 0) std::printf("federated accuracy: %.4f\n", s.federated_accuracy);
  if (s.centralized_accuracy >= 0) std::printf("centralized accuracy: %.4f\n", s.centralized_accuracy);
  if (s.close >= 0) {
    std::printf("accuracy delta: %+.4f (%s)\n", s.accuracy_delta, s.close ? "close" : "not close");
  }
  if (s.twin_records > 0) std::printf("twin records: %llu\n", static_cast<unsigned long long>(s.twin_records));
  if (s.frames_audited > 0) {
    std::printf("frames audited: %llu\n", static_cast<unsigned long long>(s.frames_audited));
  }
}

using RunFn = biofed_status (*)(const biofed_config*, const char*, int, biofed_run_summary*);

int run_command(const RunFlags& f, RunFn fn) {
  biofed_config* cfg = nullptr;
  biofed_status st = build_config(f, &cfg);
  if (st == BIOFED_OK) {
    biofed_run_summary summary{};
    st = fn(cfg, f.out.c_str(), f.force ? 1 : 0, &summary);
    if (st == BIOFED_OK) print_summary(summary);
  }
  biofed_config_free(cfg);
  return st == BIOFED_OK ? kExitOk : report_failure(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated CNN training with a centralized baseline and digital-twin records"};
  app.require_subcommand(1);
  app.set_version_flag("--version", biofed_version());
  int exit_code = kExitOk;

  RunFlags sim;
  auto* simulate = app.add_subcommand("simulate", "In-process federation, baseline, metrics and twins");
  add_run_flags(simulate, sim);
  simulate->callback([&] { exit_code = run_command(sim, biofed_simulate); });

  RunFlags cen;
  auto* central = app.add_subcommand("centralized", "Centralized baseline only");
  add_run_flags(central, cen);
  central->callback([&] { exit_code = run_command(cen, biofed_centralized); });

  RunFlags srv;
  auto* server = app.add_subcommand("server", "Socket federation server");
  add_run_flags(server, srv);
  server->add_option("--host", srv.host, "Listen address");
  server->add_option("--port", srv.port, "Listen port (0 picks one; written to <out>/port)");
  server->callback([&] { exit_code = run_command(srv, biofed_serve); });

  std::string shard;
  std::string client_host;
  std::uint16_t client_port = 0;
  std::uint16_t protocol_version = 0;
  std::uint32_t connect_timeout_ms = 0;
  auto* client = app.add_subcommand("client", "Join a socket federation with one shard");
  client->add_option("--shard", shard, "Shard file written by partition")->required()->check(CLI::ExistingFile);
  client->add_option("--host", client_host, "Server address (default from the shard file)");
  client->add_option("--port", client_port, "Server port (default from the shard file)");
  client->add_option("--connect-timeout-ms", connect_timeout_ms, "How long to retry connecting");
  client->add_option("--protocol-version", protocol_version)->group("");
  client->callback([&] {
    const biofed_status st = biofed_client(shard.c_str(), client_host.empty() ? nullptr : client_host.c_str(),
                                           client_port, protocol_version, connect_timeout_ms);
    exit_code = st == BIOFED_OK ? kExitOk : report_failure(st);
  });

  RunFlags part;
  auto* partition = app.add_subcommand("partition", "Write one shard file per client");
  add_run_flags(partition, part);
  partition->callback([&] {
    biofed_config* cfg = nullptr;
    biofed_status st = build_config(part, &cfg);
    char* paths = nullptr;
    if (st == BIOFED_OK) st = biofed_partition(cfg, part.out.c_str(), part.force ? 1 : 0, &paths);
    if (st == BIOFED_OK) std::fputs(paths, stdout);
    biofed_string_free(paths);
    biofed_config_free(cfg);
    exit_code = st == BIOFED_OK ? kExitOk : report_failure(st);
  });

  std::string run_dir;
  double threshold = 0.05;
  bool assert_close = false;
  bool report_force = false;
  auto* report = app.add_subcommand("report", "Render metrics, confusion matrices and the comparison");
  report->add_option("run", run_dir, "Finished run directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--threshold", threshold, "Accuracy gap still counted as close")->check(CLI::Range(0.0, 1.0));
  report->add_flag("--assert-close", assert_close, "Exit 4 unless federated is close to centralized");
  report->add_flag("--force", report_force, "Replace an existing report directory");
  report->callback([&] {
    char* text = nullptr;
    int close = -1;
    biofed_status st = biofed_report(run_dir.c_str(), threshold, report_force ? 1 : 0, &text, &close);
    if (st != BIOFED_OK) {
      exit_code = report_failure(st);
      return;
    }
    std::fputs(text, stdout);
    biofed_string_free(text);
    if (assert_close && close != 1) {
      std::fprintf(stderr, "biofed: %s\n",
                   close == 0 ? "federated accuracy is not close to centralized"
                              : "--assert-close needs both a federated and a centralized model");
      exit_code = kExitNotClose;
    }
  });

  auto* config = app.add_subcommand("config", "Configuration helpers");
  config->require_subcommand(1);
  auto* print_default = config->add_subcommand("print-default", "Print the default configuration");
  print_default->callback([&] {
    biofed_config* cfg = nullptr;
    char* text = nullptr;
    biofed_status st = biofed_config_default(&cfg);
    if (st == BIOFED_OK) st = biofed_config_to_json(cfg, &text);
    if (st == BIOFED_OK) std::fputs(text, stdout);
    biofed_string_free(text);
    biofed_config_free(cfg);
    exit_code = st == BIOFED_OK ? kExitOk : report_failure(st);
  });
  std::string check_path;
  auto* check = config->add_subcommand("check", "Validate a configuration file");
  check->add_option("file", check_path)->required();
  check->callback([&] {
    biofed_config* cfg = nullptr;
    const biofed_status st = biofed_config_load(check_path.c_str(), &cfg);
    biofed_config_free(cfg);
    if (st == BIOFED_OK) std::puts("ok");
    exit_code = st == BIOFED_OK ? kExitOk : report_failure(st);
  });

  auto* twin = app.add_subcommand("twin", "Digital-twin registry");
  twin->require_subcommand(1);
  std::string twin_run;
  std::string twin_class;
  std::string twin_site;
  std::int64_t twin_round = -1;
  bool twin_json = false;
  auto* query = twin->add_subcommand("query", "List twin records");
  query->add_option("--run", twin_run, "Run directory holding twins.jsonl")->required();
  query->add_option("--class", twin_class, "Predicted class name");
  query->add_option("--site", twin_site, "Source site");
  query->add_option("--round", twin_round, "Model round");
  query->add_flag("--json", twin_json, "Print JSON instead of a table");
  query->callback([&] {
    biofed_twin_store* store = nullptr;
    char* text = nullptr;
    biofed_status st = biofed_twin_store_open(twin_run.c_str(), &store);
    if (st == BIOFED_OK) {
      st = biofed_twin_query(store, twin_class.empty() ? nullptr : twin_class.c_str(),
                             twin_site.empty() ? nullptr : twin_site.c_str(), twin_round, twin_json ? 1 : 0, &text);
    }
    if (st == BIOFED_OK) std::fputs(text, stdout);
    biofed_string_free(text);
    biofed_twin_store_free(store);
    exit_code = st == BIOFED_OK ? kExitOk : report_failure(st);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  return exit_code;
}
