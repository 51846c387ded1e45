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

#include "app/config.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace biofed::app {

using nlohmann::json;

void RunConfig::propagate_seed() {
  federation.seed = seed;
  federation.train.seed = seed;
}

std::size_t RunConfig::effective_centralized_epochs() const {
  if (centralized_epochs > 0) return centralized_epochs;
  return federation.rounds * federation.train.local_epochs;
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.federation.num_clients = 3;
  cfg.federation.clients_required = 3;
  cfg.federation.rounds = 10;
  cfg.federation.round_timeout = std::chrono::milliseconds(120000);
  cfg.federation.train.learning_rate = 0.05;
  cfg.federation.train.batch_size = 16;
  cfg.federation.train.local_epochs = 1;
  cfg.propagate_seed();
  return cfg;
}

json config_to_json(const RunConfig& c) {
  const auto& f = c.federation;
  return json{
      {"seed", c.seed},
      {"dataset",
       {{"source", c.dataset.source},
        {"manifest", c.dataset.manifest},
        {"test_fraction", c.dataset.test_fraction},
        {"num_classes", c.dataset.num_classes},
        {"samples_per_class", c.dataset.samples_per_class},
        {"image_shape", c.dataset.image_shape},
        {"noise", c.dataset.noise}}},
      {"partition", {{"strategy", data::strategy_name(c.strategy)}}},
      {"federation",
       {{"num_clients", f.num_clients},
        {"rounds", f.rounds},
        {"clients_required", f.clients_required},
        {"round_timeout_ms", f.round_timeout.count()}}},
      {"train",
       {{"learning_rate", f.train.learning_rate},
        {"batch_size", f.train.batch_size},
        {"local_epochs", f.train.local_epochs}}},
      {"centralized", {{"enabled", c.centralized}, {"epochs", c.centralized_epochs}}},
      {"twins", {{"enabled", c.twins}}},
      {"report", {{"accuracy_threshold", c.accuracy_threshold}}},
      {"server", {{"host", c.host}, {"port", c.port}, {"accept_timeout_ms", c.accept_timeout_ms}}},
      {"transport", {{"max_frame_bytes", c.max_frame_bytes}, {"audit", c.audit}}},
  };
}

namespace {

class FieldReader {
 public:
  explicit FieldReader(const json& doc) : doc_(doc) {}

  template <class T, class Check>
  void read(const std::string& path, T& out, Check check) {
    const json* node = lookup(path);
    if (!node) return;
    if (!type_ok<T>(*node)) {
      errors_.push_back(path + ": expected " + expected<T>() + ", got " + describe(*node));
      return;
    }
    try {
      T value = node->get<T>();
      if (std::string problem = check(value); !problem.empty()) {
        errors_.push_back(path + ": " + problem);
        return;
      }
      out = value;
    } catch (const json::exception&) {
      errors_.push_back(path + ": expected " + expected<T>());
    }
  }

  template <class T>
  void read(const std::string& path, T& out) {
    read(path, out, [](const T&) { return std::string(); });
  }

  void add(const std::string& path, const std::string& problem) { errors_.push_back(path + ": " + problem); }
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  const json* lookup(const std::string& path) {
    const json* node = &doc_;
    std::size_t start = 0;
    while (start <= path.size()) {
      const std::size_t dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!node->is_object() || !node->contains(key)) return nullptr;
      node = &(*node)[key];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return node;
  }

  // nlohmann converts silently between numeric kinds, so types and integer
  // ranges are checked before get().
  template <class T>
  static bool type_ok(const json& node) {
    if constexpr (std::is_same_v<T, bool>) {
      return node.is_boolean();
    } else if constexpr (std::is_same_v<T, std::string>) {
      return node.is_string();
    } else if constexpr (std::is_floating_point_v<T>) {
      return node.is_number();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      return node.is_number_unsigned() && node.get<std::uint64_t>() <= std::numeric_limits<T>::max();
    } else if constexpr (std::is_integral_v<T>) {
      return node.is_number_integer();
    } else {
      if (!node.is_array()) return false;
      for (const auto& e : node) {
        if (!e.is_number_unsigned()) return false;
      }
      return true;
    }
  }

  static std::string describe(const json& node) {
    if (node.is_number()) return node.dump();
    return node.type_name();
  }

  template <class T>
  static std::string expected() {
    if constexpr (std::is_same_v<T, bool>) return "boolean";
    else if constexpr (std::is_same_v<T, std::string>) return "string";
    else if constexpr (std::is_floating_point_v<T>) return "number";
    else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      return "integer in [0, " + std::to_string(std::numeric_limits<T>::max()) + "]";
    }
    else if constexpr (std::is_integral_v<T>) return "integer";
    else return "array of integers";
  }

  const json& doc_;
  std::vector<std::string> errors_;
};

// Keys present in `doc` but not in the template are reported with paths.
void unknown_keys(const json& doc, const json& tmpl, const std::string& prefix, std::vector<std::string>& errors) {
  if (!doc.is_object()) return;
  for (const auto& [key, value] : doc.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!tmpl.contains(key)) {
      errors.push_back(path + ": unknown field");
    } else if (tmpl[key].is_object()) {
      if (!value.is_object()) {
        errors.push_back(path + ": expected object, got " + std::string(value.type_name()));
      } else {
        unknown_keys(value, tmpl[key], path, errors);
      }
    }
  }
}

std::string positive_int(std::uint64_t v) { return v >= 1 ? "" : "must be >= 1"; }

}  // namespace

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kValidation, "<root>: expected object");
  RunConfig c = default_config();
  const json tmpl = config_to_json(c);
  std::vector<std::string> errors;
  unknown_keys(doc, tmpl, "", errors);

  // Read raw, then check each field; integers are read wide so negative or
  // oversized input is reported instead of wrapped.
  FieldReader r(doc);
  r.read("seed", c.seed);
  r.read("dataset.source", c.dataset.source, [](const std::string& s) {
    return s == "synthetic" || s == "manifest" ? "" : "must be \"synthetic\" or \"manifest\"";
  });
  r.read("dataset.manifest", c.dataset.manifest);
  r.read("dataset.test_fraction", c.dataset.test_fraction,
         [](double v) { return v > 0.0 && v < 1.0 ? "" : "must be in (0, 1)"; });
  std::uint64_t classes = c.dataset.num_classes;
  r.read("dataset.num_classes", classes, [](std::uint64_t v) { return v >= 2 ? "" : "must be >= 2"; });
  c.dataset.num_classes = classes;
  std::uint64_t per_class = c.dataset.samples_per_class;
  r.read("dataset.samples_per_class", per_class, [](std::uint64_t v) { return v >= 2 ? "" : "must be >= 2"; });
  c.dataset.samples_per_class = per_class;
  std::vector<std::uint64_t> shape(c.dataset.image_shape.begin(), c.dataset.image_shape.end());
  r.read("dataset.image_shape", shape, [](const std::vector<std::uint64_t>& s) {
    if (s.size() != 3) return "must be [channels, height, width]";
    if (s[0] != 1 && s[0] != 3) return "channels must be 1 or 3";
    if (s[1] < 4 || s[2] < 4 || s[1] > 512 || s[2] > 512) return "height and width must be in [4, 512]";
    return "";
  });
  c.dataset.image_shape.assign(shape.begin(), shape.end());
  r.read("dataset.noise", c.dataset.noise, [](double v) { return v >= 0.0 && v <= 10.0 ? "" : "must be in [0, 10]"; });

  std::string strategy = data::strategy_name(c.strategy);
  r.read("partition.strategy", strategy, [](const std::string& s) {
    return s == "iid" || s == "label-skew" ? "" : "must be \"iid\" or \"label-skew\"";
  });
  if (strategy == "iid" || strategy == "label-skew") c.strategy = data::parse_strategy(strategy);

  auto& f = c.federation;
  std::uint64_t n = f.num_clients, rounds = f.rounds, required = f.clients_required;
  r.read("federation.num_clients", n, [](std::uint64_t v) { return v >= 1 && v <= 1024 ? "" : "must be in [1, 1024]"; });
  r.read("federation.rounds", rounds, positive_int);
  r.read("federation.clients_required", required, positive_int);
  f.num_clients = n;
  f.rounds = rounds;
  f.clients_required = required;
  if (required > n) r.add("federation.clients_required", "must be <= federation.num_clients");
  std::int64_t timeout = f.round_timeout.count();
  r.read("federation.round_timeout_ms", timeout, [](std::int64_t v) { return v > 0 ? "" : "must be positive"; });
  f.round_timeout = std::chrono::milliseconds(timeout);

  r.read("train.learning_rate", f.train.learning_rate,
         [](double v) { return v > 0.0 && v <= 10.0 ? "" : "must be in (0, 10]"; });
  r.read("train.batch_size", f.train.batch_size, [](std::uint32_t v) { return v >= 1 ? "" : "must be >= 1"; });
  r.read("train.local_epochs", f.train.local_epochs, [](std::uint32_t v) { return v >= 1 ? "" : "must be >= 1"; });

  r.read("centralized.enabled", c.centralized);
  std::uint64_t epochs = c.centralized_epochs;
  r.read("centralized.epochs", epochs);
  c.centralized_epochs = epochs;
  r.read("twins.enabled", c.twins);
  r.read("report.accuracy_threshold", c.accuracy_threshold,
         [](double v) { return v >= 0.0 && v <= 1.0 ? "" : "must be in [0, 1]"; });
  r.read("server.host", c.host, [](const std::string& s) { return s.empty() ? "must not be empty" : ""; });
  r.read("server.port", c.port);
  r.read("server.accept_timeout_ms", c.accept_timeout_ms,
         [](std::uint32_t v) { return v >= 1 ? "" : "must be positive"; });
  std::uint64_t max_frame = c.max_frame_bytes;
  r.read("transport.max_frame_bytes", max_frame,
         [](std::uint64_t v) { return v >= 64 && v <= (1ull << 32) - 1 ? "" : "must be in [64, 2^32)"; });
  c.max_frame_bytes = max_frame;
  r.read("transport.audit", c.audit);

  errors.insert(errors.end(), r.errors().begin(), r.errors().end());
  if (c.dataset.source == "manifest" && c.dataset.manifest.empty()) {
    errors.push_back("dataset.manifest: required when dataset.source is \"manifest\"");
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration";
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(ErrorCode::kValidation, msg);
  }
  c.propagate_seed();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, path + ": " + e.what());
  }
  return config_from_json(doc);
}

RunConfig apply_patch(const RunConfig& cfg, const json& patch) {
  json doc = config_to_json(cfg);
  doc.merge_patch(patch);
  return config_from_json(doc);
}

data::SyntheticSpec synthetic_spec(const RunConfig& cfg) {
  data::SyntheticSpec spec;
  spec.num_classes = cfg.dataset.num_classes;
  spec.samples_per_class = cfg.dataset.samples_per_class;
  spec.image_shape = cfg.dataset.image_shape;
  spec.seed = cfg.seed;
  spec.noise = cfg.dataset.noise;
  spec.test_fraction = cfg.dataset.test_fraction;
  return spec;
}

}  // namespace biofed::app
