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

#ifndef EMOFLOW_BASELINE_H_
#define EMOFLOW_BASELINE_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "emoflow/models.h"

namespace emoflow {

// Multinomial naive Bayes over whitespace-token counts, fitted in closed
// form. For a document d with in-vocabulary tokens w_1..w_n:
//
//   P(c | d)  ∝  (N_c / N) * prod_i (count(w_i, c) + alpha)
//                                    / (tokens(c) + alpha * |V|)
//
// Classes absent from training get probability 0; tokens outside the
// training vocabulary are ignored. Each "epoch" refits the same counts, so
// every log row is identical and early stopping halts after `patience`
// epochs.
class NaiveBayesModel : public TrainedModel {
 public:
  using CountRow = std::array<std::size_t, kNumLabels>;

  NaiveBayesModel(std::map<std::string, CountRow> word_counts,
                  CountRow doc_counts, double alpha, ModelMetadata metadata);

  static NaiveBayesModel train(const LabeledDataset& data, double alpha,
                               ModelMetadata metadata);
  static NaiveBayesModel load_from(const std::filesystem::path& dir);

  std::vector<ProbabilityVector> predict_proba(
      const std::vector<std::string>& texts) const override;
  ProbabilityVector posterior(const std::string& text) const;
  const ModelMetadata& metadata() const override { return metadata_; }
  // Writes counts.tsv (word<TAB>five class counts) and metadata.json.
  void save(const std::filesystem::path& dir) const override;

  const std::map<std::string, CountRow>& word_counts() const {
    return word_counts_;
  }
  const CountRow& doc_counts() const { return doc_counts_; }
  double alpha() const { return alpha_; }

  bool operator==(const NaiveBayesModel& other) const {
    return word_counts_ == other.word_counts_ &&
           doc_counts_ == other.doc_counts_ && alpha_ == other.alpha_ &&
           metadata_ == other.metadata_;
  }

 private:
  std::map<std::string, CountRow> word_counts_;
  CountRow doc_counts_{};
  CountRow token_totals_{};
  double alpha_;
  ModelMetadata metadata_;
};

class NaiveBayesBackend : public ClassifierBackend {
 public:
  explicit NaiveBayesBackend(double alpha = 1.0) : alpha_(alpha) {}

  std::string backend_id() const override { return "baseline-nb"; }
  std::string display_name() const override { return "NaiveBayes"; }
  FitResult fit(const LabeledDataset& train, const LabeledDataset& validation,
                const TrainConfig& config) override;
  std::unique_ptr<TrainedModel> load(
      const std::filesystem::path& dir) const override;

 private:
  double alpha_;
};

}  // namespace emoflow

#endif  // EMOFLOW_BASELINE_H_
