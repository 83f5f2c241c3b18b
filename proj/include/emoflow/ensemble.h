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

#ifndef EMOFLOW_ENSEMBLE_H_
#define EMOFLOW_ENSEMBLE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "emoflow/models.h"

namespace emoflow {

enum class Aggregation { kSoft, kHard };

std::string_view aggregation_name(Aggregation aggregation);
Aggregation parse_aggregation(std::string_view name);

struct MemberSpec {
  std::string backend_id;
  TrainConfig config;

  bool operator==(const MemberSpec&) const = default;
};

// Member i trains with seed base_seed + i on bootstrap_sample(train,
// base_seed + i); the seed in its TrainConfig is replaced.
struct EnsembleConfig {
  std::vector<MemberSpec> members;
  Aggregation aggregation = Aggregation::kSoft;
  std::uint64_t base_seed = 0;

  std::size_t size() const { return members.size(); }
  std::uint64_t member_seed(std::size_t i) const { return base_seed + i; }
  void validate() const;

  bool operator==(const EnsembleConfig&) const = default;
};

// |train| draws with replacement. Draw k of record r becomes a record with
// id "<r.id>@<k>" and resampled provenance pointing at r.id.
LabeledDataset bootstrap_sample(const LabeledDataset& train, std::uint64_t seed);

struct BaggedEnsemble {
  EnsembleConfig config;
  std::vector<std::unique_ptr<TrainedModel>> members;
  std::vector<EpochLog> member_logs;
};

using BackendRegistry = std::map<std::string, ClassifierBackend*>;

// Sequential member training. A failing member aborts with a TrainingError
// naming its index.
BaggedEnsemble fit_ensemble(const EnsembleConfig& config,
                            const BackendRegistry& backends,
                            const LabeledDataset& train,
                            const LabeledDataset& validation);

struct EnsemblePrediction {
  std::vector<EmotionLabel> labels;
  std::vector<ProbabilityVector> probabilities;
};

// per_member[m][t] is member m's vector for text t. Soft: mean vector and
// its argmax. Hard: majority over member argmaxes, ties to the earliest
// label; the vector holds vote fractions.
EnsemblePrediction aggregate_predictions(
    const std::vector<std::vector<ProbabilityVector>>& per_member,
    Aggregation aggregation);

EnsemblePrediction predict_ensemble(const BaggedEnsemble& ensemble,
                                    const std::vector<std::string>& texts);

}  // namespace emoflow

#endif  // EMOFLOW_ENSEMBLE_H_
