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

#include "emoflow/serialize.h"

#include <algorithm>
#include <cstring>

#include "emoflow/error.h"

namespace emoflow {

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
      return item.key() == k;
    });
    if (!known) throw ConfigError(context + ": unknown key '" + item.key() + "'");
  }
}

Json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"dropout", c.dropout_probability},
          {"weight_decay", c.weight_decay},
          {"early_stopping",
           {{"enabled", c.early_stopping.enabled},
            {"patience", c.early_stopping.patience}}},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const Json& j, const TrainConfig& defaults) {
  check_keys(j, {"epochs", "batch_size", "learning_rate", "dropout",
                 "weight_decay", "early_stopping", "seed"},
             "train config");
  TrainConfig c = defaults;
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.dropout_probability = j.value("dropout", c.dropout_probability);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.seed = j.value("seed", c.seed);
    if (j.contains("early_stopping")) {
      const auto& es = j["early_stopping"];
      check_keys(es, {"enabled", "patience"}, "early_stopping");
      c.early_stopping.enabled = es.value("enabled", c.early_stopping.enabled);
      c.early_stopping.patience = es.value("patience", c.early_stopping.patience);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

Json to_json(const EpochLog& log) {
  Json rows = Json::array();
  for (const auto& r : log) {
    rows.push_back({{"epoch", r.epoch},
                    {"train_loss", r.train_loss},
                    {"validation_loss", r.validation_loss},
                    {"validation_accuracy", r.validation_accuracy}});
  }
  return rows;
}

EpochLog epoch_log_from_json(const Json& j) {
  EpochLog log;
  try {
    for (const auto& r : j) {
      log.push_back({r.at("epoch").get<int>(), r.at("train_loss").get<double>(),
                     r.at("validation_loss").get<double>(),
                     r.at("validation_accuracy").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed epoch log: ") + e.what());
  }
  return log;
}

Json to_json(const ModelMetadata& m) {
  return {{"backend_id", m.backend_id},
          {"config", to_json(m.config)},
          {"dataset_fingerprint", m.dataset_fingerprint}};
}

ModelMetadata metadata_from_json(const Json& j) {
  try {
    return {j.at("backend_id").get<std::string>(),
            train_config_from_json(j.at("config")),
            j.at("dataset_fingerprint").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model metadata: ") + e.what());
  }
}

}  // namespace emoflow
