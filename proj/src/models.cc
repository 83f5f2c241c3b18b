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

#include "emoflow/models.h"

#include <algorithm>
#include <cmath>

#include "emoflow/error.h"

namespace emoflow {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (!(dropout_probability >= 0 && dropout_probability < 1)) {
    throw ConfigError("dropout_probability must be in [0, 1)");
  }
  if (!(weight_decay >= 0)) throw ConfigError("weight_decay must be >= 0");
  if (early_stopping.enabled && early_stopping.patience < 1) {
    throw ConfigError("early stopping patience must be >= 1");
  }
}

const EpochRecord& FitResult::selected() const {
  for (const auto& row : log) {
    if (row.epoch == selected_epoch) return row;
  }
  throw TrainingError("selected epoch " + std::to_string(selected_epoch) +
                      " is not in the epoch log");
}

FitResult fit(ClassifierBackend& backend, const LabeledDataset& train,
              const LabeledDataset& validation, const TrainConfig& config) {
  config.validate();
  if (train.empty()) throw DataError("training split is empty");
  if (validation.empty()) throw DataError("validation split is empty");

  FitResult result = backend.fit(train, validation, config);
  if (!result.model) throw TrainingError("backend returned no model");
  if (result.log.empty()) throw TrainingError("backend returned an empty epoch log");
  for (const auto& row : result.log) {
    if (!std::isfinite(row.train_loss) || !std::isfinite(row.validation_loss)) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(row.epoch));
    }
  }
  if (!config.early_stopping.enabled &&
      result.log.size() != static_cast<std::size_t>(config.epochs)) {
    throw TrainingError("epoch log has " + std::to_string(result.log.size()) +
                        " rows, expected " + std::to_string(config.epochs));
  }
  result.selected();  // validates selected_epoch
  return result;
}

std::vector<ProbabilityVector> predict_proba(const TrainedModel& model,
                                             const std::vector<std::string>& texts) {
  auto out = model.predict_proba(texts);
  if (out.size() != texts.size()) {
    throw TrainingError("model returned " + std::to_string(out.size()) +
                        " predictions for " + std::to_string(texts.size()) +
                        " texts");
  }
  for (const auto& p : out) {
    double sum = 0;
    for (double v : p) {
      if (!(v >= 0)) throw TrainingError("negative or NaN probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw TrainingError("probability vector does not sum to 1");
    }
  }
  return out;
}

EmotionLabel argmax_label(const ProbabilityVector& probs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return label_from_index(best);
}

double cross_entropy(const ProbabilityVector& probs, EmotionLabel label) {
  return -std::log(std::max(probs[label_index(label)], 1e-12));
}

LossAccuracy evaluate_loss_accuracy(const std::vector<ProbabilityVector>& probs,
                                    const std::vector<EmotionLabel>& labels) {
  if (probs.size() != labels.size() || probs.empty()) {
    throw DataError("evaluation needs equal, non-zero numbers of predictions and labels");
  }
  double loss = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    loss += cross_entropy(probs[i], labels[i]);
    if (argmax_label(probs[i]) == labels[i]) ++correct;
  }
  const auto n = static_cast<double>(probs.size());
  return {loss / n, static_cast<double>(correct) / n};
}

bool EarlyStopper::observe(int epoch, double validation_loss) {
  if (best_epoch_ == 0 || validation_loss < best_loss_) {
    best_loss_ = validation_loss;
    best_epoch_ = epoch;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

bool EarlyStopper::should_stop() const {
  return policy_.enabled && since_best_ >= policy_.patience;
}

}  // namespace emoflow
