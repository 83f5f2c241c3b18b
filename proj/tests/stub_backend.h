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

#ifndef EMOFLOW_TESTS_STUB_BACKEND_H_
#define EMOFLOW_TESTS_STUB_BACKEND_H_

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "emoflow/error.h"
#include "emoflow/models.h"

namespace emoflow::testing {

// Predicts the same vector for every text.
class ConstantModel : public TrainedModel {
 public:
  ConstantModel(ProbabilityVector p, ModelMetadata meta) : p_(p), meta_(std::move(meta)) {}
  std::vector<ProbabilityVector> predict_proba(
      const std::vector<std::string>& texts) const override {
    return std::vector<ProbabilityVector>(texts.size(), p_);
  }
  const ModelMetadata& metadata() const override { return meta_; }
  void save(const std::filesystem::path&) const override {}

 private:
  ProbabilityVector p_;
  ModelMetadata meta_;
};

// Validation accuracy and loss are injected functions of the config; the
// returned model predicts a fixed vector. Throws for configs rejected by
// `fails`.
class StubBackend : public ClassifierBackend {
 public:
  using Score = std::function<std::pair<double, double>(const TrainConfig&)>;
  StubBackend(Score score, ProbabilityVector output = {1, 0, 0, 0, 0},
              std::function<bool(const TrainConfig&)> fails = {})
      : score_(std::move(score)), output_(output), fails_(std::move(fails)) {}

  std::string backend_id() const override { return "stub"; }
  std::string display_name() const override { return "Stub"; }
  FitResult fit(const LabeledDataset& train, const LabeledDataset&,
                const TrainConfig& config) override {
    if (fails_ && fails_(config)) throw TrainingError("stub refuses this cell");
    const auto [acc, loss] = score_(config);
    FitResult r;
    for (int e = 1; e <= config.epochs; ++e) r.log.push_back({e, loss, loss, acc});
    r.selected_epoch = config.epochs;
    r.model = std::make_unique<ConstantModel>(
        output_, ModelMetadata{backend_id(), config, train.fingerprint()});
    trained_sizes.push_back(train.size());
    return r;
  }
  std::unique_ptr<TrainedModel> load(const std::filesystem::path&) const override {
    throw Error(ErrorKind::kIo, "stub models are not persisted");
  }

  std::vector<std::size_t> trained_sizes;

 private:
  Score score_;
  ProbabilityVector output_;
  std::function<bool(const TrainConfig&)> fails_;
};

}  // namespace emoflow::testing

#endif  // EMOFLOW_TESTS_STUB_BACKEND_H_
