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

#include "emoflow/ensemble.h"

#include "emoflow/error.h"
#include "emoflow/rng.h"

namespace emoflow {

std::string_view aggregation_name(Aggregation aggregation) {
  return aggregation == Aggregation::kSoft ? "soft" : "hard";
}

Aggregation parse_aggregation(std::string_view name) {
  if (name == "soft") return Aggregation::kSoft;
  if (name == "hard") return Aggregation::kHard;
  throw ConfigError("aggregation must be 'soft' or 'hard', got '" +
                    std::string(name) + "'");
}

void EnsembleConfig::validate() const {
  if (members.empty()) throw ConfigError("ensemble needs at least one member");
  for (const auto& m : members) {
    if (m.backend_id.empty()) throw ConfigError("ensemble member without backend");
    m.config.validate();
  }
}

LabeledDataset bootstrap_sample(const LabeledDataset& train, std::uint64_t seed) {
  if (train.empty()) throw DataError("cannot bootstrap an empty dataset");
  const auto& records = train.records();
  Rng rng(seed);
  std::vector<std::size_t> draws_of(records.size(), 0);
  std::vector<ReviewRecord> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t pick = rng.below(records.size());
    const ReviewRecord& source = records[pick];
    ReviewRecord copy = source;
    copy.id = source.id + "@" + std::to_string(draws_of[pick]++);
    copy.provenance = Provenance::resampled(source.id);
    out.push_back(std::move(copy));
  }
  return LabeledDataset(std::move(out));
}

BaggedEnsemble fit_ensemble(const EnsembleConfig& config,
                            const BackendRegistry& backends,
                            const LabeledDataset& train,
                            const LabeledDataset& validation) {
  config.validate();
  BaggedEnsemble ensemble;
  ensemble.config = config;
  for (std::size_t i = 0; i < config.members.size(); ++i) {
    const auto& member = config.members[i];
    auto it = backends.find(member.backend_id);
    if (it == backends.end() || it->second == nullptr) {
      throw ConfigError("ensemble member " + std::to_string(i) +
                        " names unknown backend '" + member.backend_id + "'");
    }
    TrainConfig member_config = member.config;
    member_config.seed = config.member_seed(i);
    try {
      auto sample = bootstrap_sample(train, config.member_seed(i));
      FitResult fitted = fit(*it->second, sample, validation, member_config);
      ensemble.members.push_back(std::move(fitted.model));
      ensemble.member_logs.push_back(std::move(fitted.log));
    } catch (const std::exception& e) {
      throw TrainingError("ensemble member " + std::to_string(i) +
                          " failed: " + e.what());
    }
  }
  return ensemble;
}

EnsemblePrediction aggregate_predictions(
    const std::vector<std::vector<ProbabilityVector>>& per_member,
    Aggregation aggregation) {
  if (per_member.empty()) throw DataError("no member predictions to aggregate");
  const std::size_t n_texts = per_member.front().size();
  for (const auto& m : per_member) {
    if (m.size() != n_texts) throw DataError("members disagree on prediction count");
  }
  const double n_members = static_cast<double>(per_member.size());

  EnsemblePrediction out;
  out.labels.reserve(n_texts);
  out.probabilities.reserve(n_texts);
  for (std::size_t t = 0; t < n_texts; ++t) {
    ProbabilityVector acc{};
    for (const auto& member : per_member) {
      if (aggregation == Aggregation::kSoft) {
        for (std::size_t c = 0; c < kNumLabels; ++c) acc[c] += member[t][c];
      } else {
        acc[label_index(argmax_label(member[t]))] += 1.0;
      }
    }
    for (auto& v : acc) v /= n_members;
    out.labels.push_back(argmax_label(acc));
    out.probabilities.push_back(acc);
  }
  return out;
}

EnsemblePrediction predict_ensemble(const BaggedEnsemble& ensemble,
                                    const std::vector<std::string>& texts) {
  if (ensemble.members.empty()) throw DataError("ensemble has no trained members");
  std::vector<std::vector<ProbabilityVector>> per_member;
  per_member.reserve(ensemble.members.size());
  for (const auto& m : ensemble.members) per_member.push_back(predict_proba(*m, texts));
  return aggregate_predictions(per_member, ensemble.config.aggregation);
}

}  // namespace emoflow
