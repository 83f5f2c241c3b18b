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

#include "emoflow/baseline.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "emoflow/csv.h"
#include "emoflow/error.h"
#include "emoflow/serialize.h"

namespace emoflow {
namespace {

template <typename Fn>
void for_each_token(std::string_view text, Fn fn) {
  std::size_t i = 0;
  auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && ws(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !ws(text[i])) ++i;
    if (i > start) fn(text.substr(start, i - start));
  }
}

constexpr const char* kCountsFile = "counts.tsv";
constexpr const char* kMetadataFile = "metadata.json";

}  // namespace

NaiveBayesModel::NaiveBayesModel(std::map<std::string, CountRow> word_counts,
                                 CountRow doc_counts, double alpha,
                                 ModelMetadata metadata)
    : word_counts_(std::move(word_counts)),
      doc_counts_(doc_counts),
      alpha_(alpha),
      metadata_(std::move(metadata)) {
  if (!(alpha_ > 0)) throw ConfigError("smoothing alpha must be positive");
  for (const auto& [word, row] : word_counts_) {
    for (std::size_t c = 0; c < kNumLabels; ++c) token_totals_[c] += row[c];
  }
}

NaiveBayesModel NaiveBayesModel::train(const LabeledDataset& data, double alpha,
                                       ModelMetadata metadata) {
  std::map<std::string, CountRow> words;
  CountRow docs{};
  for (const auto& r : data.records()) {
    const std::size_t c = label_index(r.label);
    ++docs[c];
    for_each_token(r.text, [&](std::string_view token) {
      ++words[std::string(token)][c];
    });
  }
  return NaiveBayesModel(std::move(words), docs, alpha, std::move(metadata));
}

ProbabilityVector NaiveBayesModel::posterior(const std::string& text) const {
  std::size_t total_docs = 0;
  for (auto n : doc_counts_) total_docs += n;
  const double vocab = static_cast<double>(word_counts_.size());

  std::array<double, kNumLabels> log_score{};
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    log_score[c] = doc_counts_[c] == 0
                       ? -std::numeric_limits<double>::infinity()
                       : std::log(static_cast<double>(doc_counts_[c]) /
                                  static_cast<double>(total_docs));
  }
  for_each_token(text, [&](std::string_view token) {
    auto it = word_counts_.find(std::string(token));
    if (it == word_counts_.end()) return;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      if (doc_counts_[c] == 0) continue;
      log_score[c] += std::log(
          (static_cast<double>(it->second[c]) + alpha_) /
          (static_cast<double>(token_totals_[c]) + alpha_ * vocab));
    }
  });

  double peak = -std::numeric_limits<double>::infinity();
  for (double s : log_score) peak = std::max(peak, s);
  ProbabilityVector probs{};
  double sum = 0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    probs[c] = std::isinf(log_score[c]) ? 0.0 : std::exp(log_score[c] - peak);
    sum += probs[c];
  }
  for (auto& p : probs) p /= sum;
  return probs;
}

std::vector<ProbabilityVector> NaiveBayesModel::predict_proba(
    const std::vector<std::string>& texts) const {
  std::vector<ProbabilityVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(posterior(t));
  return out;
}

void NaiveBayesModel::save(const std::filesystem::path& dir) const {
  std::ostringstream out;
  out.precision(17);
  out << "#alpha\t" << alpha_ << "\n#docs";
  for (auto n : doc_counts_) out << '\t' << n;
  out << '\n';
  for (const auto& [word, row] : word_counts_) {
    out << word;
    for (auto n : row) out << '\t' << n;
    out << '\n';
  }
  csv::write_file(dir / kCountsFile, out.str());
  csv::write_file(dir / kMetadataFile, to_json(metadata_).dump(2) + "\n");
}

NaiveBayesModel NaiveBayesModel::load_from(const std::filesystem::path& dir) {
  const auto rows = csv::read_file(dir / kCountsFile);
  std::istringstream in(rows);
  std::string line;
  double alpha = 0;
  CountRow docs{};
  std::map<std::string, CountRow> words;
  bool have_alpha = false;
  bool have_docs = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string head;
    std::getline(fields, head, '\t');
    if (head == "#alpha" && !have_alpha) {
      fields >> alpha;
      have_alpha = true;
      continue;
    }
    CountRow row{};
    for (auto& n : row) {
      if (!(fields >> n)) throw DataError("malformed counts row in " + dir.string());
    }
    if (head == "#docs" && !have_docs) {
      docs = row;
      have_docs = true;
    } else {
      words.emplace(head, row);
    }
  }
  if (!have_alpha || !have_docs) {
    throw DataError("counts file lacks #alpha/#docs rows in " + dir.string());
  }
  auto meta = metadata_from_json(Json::parse(csv::read_file(dir / kMetadataFile)));
  return NaiveBayesModel(std::move(words), docs, alpha, std::move(meta));
}

FitResult NaiveBayesBackend::fit(const LabeledDataset& train,
                                 const LabeledDataset& validation,
                                 const TrainConfig& config) {
  ModelMetadata meta{backend_id(), config, train.fingerprint()};
  auto model = std::make_unique<NaiveBayesModel>(
      NaiveBayesModel::train(train, alpha_, std::move(meta)));

  const auto train_eval =
      evaluate_loss_accuracy(model->predict_proba(train.texts()), train.labels());
  const auto val_eval = evaluate_loss_accuracy(
      model->predict_proba(validation.texts()), validation.labels());

  FitResult result;
  EarlyStopper stopper(config.early_stopping);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    result.log.push_back(
        {epoch, train_eval.loss, val_eval.loss, val_eval.accuracy});
    stopper.observe(epoch, val_eval.loss);
    if (stopper.should_stop()) break;
  }
  result.selected_epoch = config.early_stopping.enabled
                              ? stopper.best_epoch()
                              : config.epochs;
  result.model = std::move(model);
  return result;
}

std::unique_ptr<TrainedModel> NaiveBayesBackend::load(
    const std::filesystem::path& dir) const {
  return std::make_unique<NaiveBayesModel>(NaiveBayesModel::load_from(dir));
}

}  // namespace emoflow
