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

#ifndef EMOFLOW_FINETUNE_H_
#define EMOFLOW_FINETUNE_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "emoflow/models.h"

namespace emoflow {

struct FineTuneSettings {
  // Shown in report tables and part of the backend id.
  std::string encoder_name = "IndoBERT";
  // Local copy of a published checkpoint (config, weights, vocab).
  std::filesystem::path model_dir;
  std::string python = "python3";
  std::string runner_module = "emoflow.finetune";
  // Prepended to PYTHONPATH for the runner; empty to use the installed
  // package.
  std::string python_path;
  std::string device = "auto";  // auto | cpu | cuda | cuda:N
  std::size_t max_length = 256;
  // Fit jobs and their checkpoints are written below this directory.
  std::filesystem::path work_dir = "finetune-jobs";

  bool operator==(const FineTuneSettings&) const = default;
};

class FineTunedModel : public TrainedModel {
 public:
  FineTunedModel(std::filesystem::path checkpoint_dir, FineTuneSettings settings,
                 ModelMetadata metadata);

  std::vector<ProbabilityVector> predict_proba(
      const std::vector<std::string>& texts) const override;
  const ModelMetadata& metadata() const override { return metadata_; }
  // Copies the checkpoint directory into dir.
  void save(const std::filesystem::path& dir) const override;

  const std::filesystem::path& checkpoint_dir() const { return checkpoint_dir_; }

 private:
  std::filesystem::path checkpoint_dir_;
  FineTuneSettings settings_;
  ModelMetadata metadata_;
};

// Fine-tunes a pretrained encoder with a five-way classification head by
// running the Python runner module (transformers + torch) as a child
// process. Head dropout is dropout_probability; optimisation is AdamW with
// decoupled weight decay. Early stopping restores the best-validation-loss
// weights.
class FineTuneBackend : public ClassifierBackend {
 public:
  explicit FineTuneBackend(FineTuneSettings settings);

  std::string backend_id() const override;
  std::string display_name() const override { return settings_.encoder_name; }
  FitResult fit(const LabeledDataset& train, const LabeledDataset& validation,
                const TrainConfig& config) override;
  std::unique_ptr<TrainedModel> load(
      const std::filesystem::path& dir) const override;

  const FineTuneSettings& settings() const { return settings_; }

 private:
  FineTuneSettings settings_;
};

}  // namespace emoflow

#endif  // EMOFLOW_FINETUNE_H_
