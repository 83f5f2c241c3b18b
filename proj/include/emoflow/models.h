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

#ifndef EMOFLOW_MODELS_H_
#define EMOFLOW_MODELS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emoflow/corpus.h"

namespace emoflow {

struct EarlyStopping {
  bool enabled = false;
  int patience = 3;  // epochs without validation-loss improvement

  bool operator==(const EarlyStopping&) const = default;
};

// One training run's hyperparameters. Defaults are the untuned baseline
// setting: batch 8, learning rate 2e-6, no dropout, no weight decay.
struct TrainConfig {
  int epochs = 4;
  int batch_size = 8;
  double learning_rate = 2e-6;
  double dropout_probability = 0.0;
  double weight_decay = 0.0;
  EarlyStopping early_stopping;
  std::uint64_t seed = 42;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

using ProbabilityVector = std::array<double, kNumLabels>;

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0;
  double validation_loss = 0;
  double validation_accuracy = 0;

  bool operator==(const EpochRecord&) const = default;
};
using EpochLog = std::vector<EpochRecord>;

struct ModelMetadata {
  std::string backend_id;
  TrainConfig config;
  std::string dataset_fingerprint;

  bool operator==(const ModelMetadata&) const = default;
};

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;
  // One probability vector per text, each summing to one.
  virtual std::vector<ProbabilityVector> predict_proba(
      const std::vector<std::string>& texts) const = 0;
  virtual const ModelMetadata& metadata() const = 0;
  virtual void save(const std::filesystem::path& dir) const = 0;
};

struct FitResult {
  std::unique_ptr<TrainedModel> model;
  EpochLog log;
  // Epoch whose weights the model holds (the best one under early stopping).
  int selected_epoch = 0;

  const EpochRecord& selected() const;
};

class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual std::string backend_id() const = 0;
  // Name used in report tables ("IndoBERT", "DistilBERT", ...).
  virtual std::string display_name() const { return backend_id(); }
  virtual FitResult fit(const LabeledDataset& train,
                        const LabeledDataset& validation,
                        const TrainConfig& config) = 0;
  virtual std::unique_ptr<TrainedModel> load(
      const std::filesystem::path& dir) const = 0;
};

// Checks preconditions, delegates to the backend and verifies the result:
// finite losses, log length, selected epoch.
FitResult fit(ClassifierBackend& backend, const LabeledDataset& train,
              const LabeledDataset& validation, const TrainConfig& config);

// Delegates and checks the normalization invariant (1e-6).
std::vector<ProbabilityVector> predict_proba(const TrainedModel& model,
                                             const std::vector<std::string>& texts);

// First maximum in fixed label order.
EmotionLabel argmax_label(const ProbabilityVector& probs);

// -log p(label), with p clamped to 1e-12.
double cross_entropy(const ProbabilityVector& probs, EmotionLabel label);

struct LossAccuracy {
  double loss = 0;
  double accuracy = 0;
};
LossAccuracy evaluate_loss_accuracy(const std::vector<ProbabilityVector>& probs,
                                    const std::vector<EmotionLabel>& labels);

// Tracks the best validation loss; should_stop() once patience epochs pass
// without strict improvement.
class EarlyStopper {
 public:
  explicit EarlyStopper(EarlyStopping policy) : policy_(policy) {}

  // Returns true when this epoch is the new best.
  bool observe(int epoch, double validation_loss);
  bool should_stop() const;
  int best_epoch() const { return best_epoch_; }

 private:
  EarlyStopping policy_;
  double best_loss_ = 0;
  int best_epoch_ = 0;
  int since_best_ = 0;
};

}  // namespace emoflow

#endif  // EMOFLOW_MODELS_H_
