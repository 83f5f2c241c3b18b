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

#ifndef EMOFLOW_SERIALIZE_H_
#define EMOFLOW_SERIALIZE_H_

#include <initializer_list>
#include <string>

#include "emoflow/models.h"
#include "json.hpp"

namespace emoflow {

using Json = nlohmann::json;

// Throws ConfigError when obj has a key outside `allowed`. Catches typos in
// hand-edited config files.
void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& context);

Json to_json(const TrainConfig& config);
// Missing keys keep the values of `defaults`.
TrainConfig train_config_from_json(const Json& j, const TrainConfig& defaults = {});

Json to_json(const EpochLog& log);
EpochLog epoch_log_from_json(const Json& j);

Json to_json(const ModelMetadata& metadata);
ModelMetadata metadata_from_json(const Json& j);

}  // namespace emoflow

#endif  // EMOFLOW_SERIALIZE_H_
