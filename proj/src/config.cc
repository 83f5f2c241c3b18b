//
// Copyright 2026 The emoflow Authors
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
//

#include <algorithm>

#include "emoflow/csv.h"
#include "emoflow/experiment.h"
#include "emoflow/hash.h"

namespace emoflow {
namespace {

template <typename T>
T get_or(const Json& j, const char* key, const T& fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

Json retry_to_json(const RetryPolicy& r) {
  return {{"max_attempts", r.max_attempts},
          {"initial_delay_ms", r.initial_delay.count()},
          {"multiplier", r.multiplier},
          {"max_delay_ms", r.max_delay.count()}};
}

RetryPolicy retry_from_json(const Json& j) {
  check_keys(j, {"max_attempts", "initial_delay_ms", "multiplier", "max_delay_ms"},
             "retry");
  RetryPolicy r;
  r.max_attempts = get_or(j, "max_attempts", r.max_attempts);
  r.initial_delay = std::chrono::milliseconds(
      get_or<long long>(j, "initial_delay_ms", r.initial_delay.count()));
  r.multiplier = get_or(j, "multiplier", r.multiplier);
  r.max_delay = std::chrono::milliseconds(
      get_or<long long>(j, "max_delay_ms", r.max_delay.count()));
  r.validate();
  return r;
}

Json backend_to_json(const BackendSettings& b) {
  Json j = {{"kind", b.kind}};
  if (b.kind == "baseline") {
    j["alpha"] = b.alpha;
  } else {
    const auto& f = b.finetune;
    j["encoder_name"] = f.encoder_name;
    j["model_dir"] = f.model_dir.string();
    j["python"] = f.python;
    j["runner_module"] = f.runner_module;
    j["python_path"] = f.python_path;
    j["device"] = f.device;
    j["max_length"] = f.max_length;
    j["work_dir"] = f.work_dir.string();
  }
  return j;
}

BackendSettings backend_from_json(const Json& j, const std::string& name) {
  check_keys(j, {"kind", "alpha", "encoder_name", "model_dir", "python",
                 "runner_module", "python_path", "device", "max_length", "work_dir"},
             "backend '" + name + "'");
  BackendSettings b;
  b.kind = get_or<std::string>(j, "kind", b.kind);
  if (b.kind != "baseline" && b.kind != "finetune") {
    throw ConfigError("backend '" + name + "': kind must be baseline or finetune");
  }
  b.alpha = get_or(j, "alpha", b.alpha);
  auto& f = b.finetune;
  f.encoder_name = get_or(j, "encoder_name", f.encoder_name);
  f.model_dir = get_or<std::string>(j, "model_dir", f.model_dir.string());
  f.python = get_or(j, "python", f.python);
  f.runner_module = get_or(j, "runner_module", f.runner_module);
  f.python_path = get_or(j, "python_path", f.python_path);
  f.device = get_or(j, "device", f.device);
  f.max_length = get_or(j, "max_length", f.max_length);
  f.work_dir = get_or<std::string>(j, "work_dir", f.work_dir.string());
  return b;
}

Json methods_to_json(const std::vector<AugmentationMethod>& methods) {
  Json out = Json::array();
  for (auto m : methods) out.push_back(std::string(method_name(m)));
  return out;
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace

std::string_view balance_mode_name(BalanceMode mode) {
  switch (mode) {
    case BalanceMode::kNone:
      return "none";
    case BalanceMode::kUndersample:
      return "undersample";
    case BalanceMode::kAugment:
      return "augment";
  }
  return "none";
}

BalanceMode parse_balance_mode(std::string_view name) {
  for (auto m : {BalanceMode::kNone, BalanceMode::kUndersample, BalanceMode::kAugment}) {
    if (name == balance_mode_name(m)) return m;
  }
  throw ConfigError("balance mode must be none, undersample or augment");
}

std::string_view run_kind_name(RunKind kind) {
  switch (kind) {
    case RunKind::kTrain:
      return "train";
    case RunKind::kTune:
      return "tune";
    case RunKind::kBag:
      return "bag";
  }
  return "train";
}

RunKind parse_run_kind(std::string_view name) {
  for (auto k : {RunKind::kTrain, RunKind::kTune, RunKind::kBag}) {
    if (name == run_kind_name(k)) return k;
  }
  throw ConfigError("unknown run kind '" + std::string(name) + "'");
}

RunKind ExperimentConfig::kind() const {
  const int active = int(train.has_value()) + int(tune.has_value()) + int(bag.has_value());
  if (active != 1) {
    throw ConfigError("exactly one of train, tune, bag must be configured (found " +
                      std::to_string(active) + ")");
  }
  return train ? RunKind::kTrain : tune ? RunKind::kTune : RunKind::kBag;
}

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  }
  if (dataset.empty()) throw ConfigError("dataset path is not set");
  split.validate();
  CleanConfig stages;
  stages.remove_stopwords = clean.remove_stopwords;
  stages.filter_alphabet = clean.filter_alphabet;
  stages.lowercase = clean.lowercase;
  stages.stage_order = clean.stage_order;
  stages.validate();
  if (clean.remove_stopwords && clean.stopwords_path.empty()) {
    throw ConfigError("remove_stopwords needs clean.stopwords");
  }
  if (balance.mode == BalanceMode::kAugment) {
    if (balance.method_cycle.empty()) throw ConfigError("balance.method_cycle is empty");
    const bool synonyms = std::find(balance.method_cycle.begin(),
                                    balance.method_cycle.end(),
                                    AugmentationMethod::kSynonym) !=
                          balance.method_cycle.end();
    if (synonyms && balance.lexicon_path.empty()) {
      throw ConfigError("SYNONYM augmentation needs balance.lexicon");
    }
    if (!(balance.synonym_rate > 0 && balance.synonym_rate <= 1)) {
      throw ConfigError("balance.synonym_rate must be in (0, 1]");
    }
    const auto& t = balance.translator.kind;
    if (t != "echo" && t != "dictionary" && t != "http") {
      throw ConfigError("translator kind must be echo, dictionary or http");
    }
    if (t == "http" && balance.translator.http.endpoint.empty()) {
      throw ConfigError("http translator needs an endpoint");
    }
    if (balance.translator.parallel_width < 1) {
      throw ConfigError("translator parallel_width must be >= 1");
    }
    balance.translator.retry.validate();
  }
  if (tokenizer.kind != "whitespace-hash" && tokenizer.kind != "wordpiece") {
    throw ConfigError("tokenizer kind must be whitespace-hash or wordpiece");
  }
  if (tokenizer.kind == "wordpiece" && tokenizer.directory.empty()) {
    throw ConfigError("wordpiece tokenizer needs tokenizer.directory");
  }
  auto need_backend = [&](const std::string& name) {
    if (backends.find(name) == backends.end()) {
      throw ConfigError("unknown backend '" + name + "'");
    }
  };
  switch (kind()) {
    case RunKind::kTrain:
      need_backend(train->backend);
      train->config.validate();
      break;
    case RunKind::kTune:
      need_backend(tune->backend);
      tune->base.validate();
      tune->grid.validate();
      for (const auto& c : tune->grid.cells(tune->base)) c.validate();
      break;
    case RunKind::kBag:
      bag->ensemble.validate();
      for (const auto& m : bag->ensemble.members) need_backend(m.backend_id);
      break;
  }
}

void ExperimentConfig::override_seed(std::uint64_t new_seed) {
  seed = new_seed;
  if (train) train->config.seed = new_seed;
  if (tune) tune->base.seed = new_seed;
  if (bag) {
    bag->ensemble.base_seed = new_seed;
    for (auto& m : bag->ensemble.members) m.config.seed = new_seed;
  }
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["dataset"] = {{"path", c.dataset},
                  {"text_column", c.columns.text_column},
                  {"label_column", c.columns.label_column}};
  Json order = Json::array();
  for (auto s : c.clean.stage_order) order.push_back(std::string(stage_name(s)));
  j["clean"] = {{"stopwords", c.clean.stopwords_path},
                {"remove_stopwords", c.clean.remove_stopwords},
                {"filter_alphabet", c.clean.filter_alphabet},
                {"lowercase", c.clean.lowercase},
                {"stage_order", order}};
  const auto& t = c.balance.translator;
  j["balance"] = {
      {"mode", std::string(balance_mode_name(c.balance.mode))},
      {"target", c.balance.target ? Json(*c.balance.target) : Json(nullptr)},
      {"method_cycle", methods_to_json(c.balance.method_cycle)},
      {"lexicon", c.balance.lexicon_path},
      {"synonym_rate", c.balance.synonym_rate},
      {"augment_raw", c.balance.augment_raw},
      {"translator",
       {{"kind", t.kind},
        {"tables", t.tables},
        {"http",
         {{"endpoint", t.http.endpoint},
          {"credential_env", t.http.credential_env},
          {"timeout_seconds", t.http.timeout_seconds},
          {"backend_id", t.http.backend_id}}},
        {"retry", retry_to_json(t.retry)},
        {"parallel_width", t.parallel_width}}}};
  j["split"] = {{"train", c.split.train},
                {"validation", c.split.validation},
                {"test", c.split.test}};
  j["seed"] = c.seed;
  j["tokenizer"] = {{"kind", c.tokenizer.kind},
                    {"directory", c.tokenizer.directory},
                    {"max_length", c.tokenizer.max_length}};
  Json backends = Json::object();
  for (const auto& [name, b] : c.backends) backends[name] = backend_to_json(b);
  j["backends"] = backends;
  if (c.train) {
    j["train"] = {{"backend", c.train->backend}, {"config", to_json(c.train->config)}};
  }
  if (c.tune) {
    j["tune"] = {{"backend", c.tune->backend},
                 {"base", to_json(c.tune->base)},
                 {"grid",
                  {{"epochs", c.tune->grid.epochs},
                   {"dropout", c.tune->grid.dropout},
                   {"weight_decay", c.tune->grid.weight_decay},
                   {"batch_size", c.tune->grid.batch_size}}},
                 {"processes", c.tune->processes}};
  }
  if (c.bag) {
    Json members = Json::array();
    for (const auto& m : c.bag->ensemble.members) {
      members.push_back({{"backend", m.backend_id}, {"config", to_json(m.config)}});
    }
    j["bag"] = {{"members", members},
                {"aggregation", std::string(aggregation_name(c.bag->ensemble.aggregation))},
                {"base_seed", c.bag->ensemble.base_seed}};
  }
  j["metrics"] = {{"averaging", c.averaging == Averaging::kWeighted ? "weighted" : "macro"}};
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  check_keys(j, {"schema_version", "name", "dataset", "clean", "balance", "split",
                 "seed", "tokenizer", "backends", "train", "tune", "bag", "metrics",
                 "output_dir"},
             "config");
  ExperimentConfig c;
  c.schema_version = get_or(j, "schema_version", 0);
  if (c.schema_version != kConfigSchemaVersion) {
    throw ConfigError("config schema_version must be " +
                      std::to_string(kConfigSchemaVersion));
  }
  c.name = get_or(j, "name", c.name);
  c.seed = get_or(j, "seed", c.seed);
  c.output_dir = get_or(j, "output_dir", c.output_dir);

  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    check_keys(d, {"path", "text_column", "label_column"}, "dataset");
    c.dataset = get_or(d, "path", c.dataset);
    c.columns.text_column = get_or(d, "text_column", c.columns.text_column);
    c.columns.label_column = get_or(d, "label_column", c.columns.label_column);
  }
  if (j.contains("clean")) {
    const auto& s = j["clean"];
    check_keys(s, {"stopwords", "remove_stopwords", "filter_alphabet", "lowercase",
                   "stage_order"},
               "clean");
    c.clean.stopwords_path = get_or(s, "stopwords", c.clean.stopwords_path);
    c.clean.remove_stopwords = get_or(s, "remove_stopwords", c.clean.remove_stopwords);
    c.clean.filter_alphabet = get_or(s, "filter_alphabet", c.clean.filter_alphabet);
    c.clean.lowercase = get_or(s, "lowercase", c.clean.lowercase);
    if (s.contains("stage_order")) {
      c.clean.stage_order.clear();
      for (const auto& name : s["stage_order"]) {
        c.clean.stage_order.push_back(parse_stage(name.get<std::string>()));
      }
    }
  }
  if (j.contains("balance")) {
    const auto& b = j["balance"];
    check_keys(b, {"mode", "target", "method_cycle", "lexicon", "synonym_rate",
                   "augment_raw", "translator"},
               "balance");
    c.balance.mode = parse_balance_mode(get_or<std::string>(b, "mode", "none"));
    if (b.contains("target") && !b["target"].is_null()) {
      c.balance.target = get_or<std::size_t>(b, "target", 0);
    }
    if (b.contains("method_cycle")) {
      c.balance.method_cycle.clear();
      for (const auto& m : b["method_cycle"]) {
        c.balance.method_cycle.push_back(parse_method(m.get<std::string>()));
      }
    }
    c.balance.lexicon_path = get_or(b, "lexicon", c.balance.lexicon_path);
    c.balance.synonym_rate = get_or(b, "synonym_rate", c.balance.synonym_rate);
    c.balance.augment_raw = get_or(b, "augment_raw", c.balance.augment_raw);
    if (b.contains("translator")) {
      const auto& t = b["translator"];
      check_keys(t, {"kind", "tables", "http", "retry", "parallel_width"}, "translator");
      auto& ts = c.balance.translator;
      ts.kind = get_or(t, "kind", ts.kind);
      ts.tables = get_or(t, "tables", ts.tables);
      ts.parallel_width = get_or(t, "parallel_width", ts.parallel_width);
      if (t.contains("http")) {
        const auto& h = t["http"];
        check_keys(h, {"endpoint", "credential_env", "timeout_seconds", "backend_id"},
                   "translator.http");
        ts.http.endpoint = get_or(h, "endpoint", ts.http.endpoint);
        ts.http.credential_env = get_or(h, "credential_env", ts.http.credential_env);
        ts.http.timeout_seconds = get_or(h, "timeout_seconds", ts.http.timeout_seconds);
        ts.http.backend_id = get_or(h, "backend_id", ts.http.backend_id);
      }
      if (t.contains("retry")) ts.retry = retry_from_json(t["retry"]);
    }
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    check_keys(s, {"train", "validation", "test"}, "split");
    c.split.train = get_or(s, "train", c.split.train);
    c.split.validation = get_or(s, "validation", c.split.validation);
    c.split.test = get_or(s, "test", c.split.test);
  }
  if (j.contains("tokenizer")) {
    const auto& t = j["tokenizer"];
    check_keys(t, {"kind", "directory", "max_length"}, "tokenizer");
    c.tokenizer.kind = get_or(t, "kind", c.tokenizer.kind);
    c.tokenizer.directory = get_or(t, "directory", c.tokenizer.directory);
    c.tokenizer.max_length = get_or(t, "max_length", c.tokenizer.max_length);
  }
  if (j.contains("backends")) {
    c.backends.clear();
    for (const auto& item : j["backends"].items()) {
      c.backends[item.key()] = backend_from_json(item.value(), item.key());
    }
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    check_keys(t, {"backend", "config"}, "train");
    TrainSection s;
    s.backend = get_or<std::string>(t, "backend", "baseline");
    s.config = train_config_from_json(t.value("config", Json::object()));
    c.train = s;
  }
  if (j.contains("tune")) {
    const auto& t = j["tune"];
    check_keys(t, {"backend", "base", "grid", "processes"}, "tune");
    TuneSection s;
    s.backend = get_or<std::string>(t, "backend", "baseline");
    s.base = train_config_from_json(t.value("base", Json::object()));
    s.processes = get_or(t, "processes", s.processes);
    if (t.contains("grid")) {
      const auto& g = t["grid"];
      check_keys(g, {"epochs", "dropout", "weight_decay", "batch_size"}, "grid");
      s.grid.epochs = get_or(g, "epochs", s.grid.epochs);
      s.grid.dropout = get_or(g, "dropout", s.grid.dropout);
      s.grid.weight_decay = get_or(g, "weight_decay", s.grid.weight_decay);
      s.grid.batch_size = get_or(g, "batch_size", s.grid.batch_size);
    }
    c.tune = s;
  }
  if (j.contains("bag")) {
    const auto& b = j["bag"];
    check_keys(b, {"members", "aggregation", "base_seed"}, "bag");
    BagSection s;
    s.ensemble.aggregation =
        parse_aggregation(get_or<std::string>(b, "aggregation", "soft"));
    s.ensemble.base_seed = get_or<std::uint64_t>(b, "base_seed", 0);
    for (const auto& m : b.value("members", Json::array())) {
      check_keys(m, {"backend", "config"}, "bag member");
      s.ensemble.members.push_back(
          {get_or<std::string>(m, "backend", "baseline"),
           train_config_from_json(m.value("config", Json::object()))});
    }
    c.bag = s;
  }
  if (j.contains("metrics")) {
    const auto& m = j["metrics"];
    check_keys(m, {"averaging"}, "metrics");
    const auto mode = get_or<std::string>(m, "averaging", "weighted");
    if (mode == "weighted") {
      c.averaging = Averaging::kWeighted;
    } else if (mode == "macro") {
      c.averaging = Averaging::kMacro;
    } else {
      throw ConfigError("metrics.averaging must be weighted or macro");
    }
  }
  return c;
}

std::string render_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

ExperimentConfig parse_config(std::string_view text) {
  Json j = Json::parse(text, nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  return config_from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig c = parse_config(csv::read_file(path));
  const auto base = std::filesystem::absolute(path).parent_path();
  c.dataset = resolve(base, c.dataset);
  c.clean.stopwords_path = resolve(base, c.clean.stopwords_path);
  c.balance.lexicon_path = resolve(base, c.balance.lexicon_path);
  for (auto& [dir, table] : c.balance.translator.tables) table = resolve(base, table);
  c.tokenizer.directory = resolve(base, c.tokenizer.directory);
  for (auto& [name, b] : c.backends) {
    b.finetune.model_dir = resolve(base, b.finetune.model_dir.string());
    if (!b.finetune.python_path.empty()) {
      b.finetune.python_path = resolve(base, b.finetune.python_path);
    }
  }
  return c;
}

std::string config_hash(const ExperimentConfig& config) {
  // The output location is not part of a run's identity.
  ExperimentConfig keyed = config;
  keyed.output_dir.clear();
  return hash_hex(render_config(keyed)).substr(0, 12);
}

}  // namespace emoflow
