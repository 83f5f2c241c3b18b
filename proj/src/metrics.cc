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

#include "emoflow/metrics.h"

#include "emoflow/error.h"

namespace emoflow {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : k_(num_classes), cells_(num_classes * num_classes, 0) {
  if (k_ == 0) throw ConfigError("confusion matrix needs at least one class");
}

ConfusionMatrix ConfusionMatrix::from_rows(
    const std::vector<std::vector<std::size_t>>& rows) {
  ConfusionMatrix cm(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != rows.size()) {
      throw DataError("confusion matrix rows must be square");
    }
    for (std::size_t p = 0; p < rows.size(); ++p) cm.add(t, p, rows[t][p]);
  }
  return cm;
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::size_t n) {
  if (truth >= k_ || predicted >= k_) throw DataError("class index out of range");
  cells_[truth * k_ + predicted] += n;
  total_ += n;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < k_; ++p) s += at(truth, p);
  return s;
}

std::size_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::size_t s = 0;
  for (std::size_t t = 0; t < k_; ++t) s += at(t, predicted);
  return s;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += at(i, i);
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> y_true,
                                 std::span<const std::size_t> y_pred,
                                 std::size_t num_classes) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("label sequences differ in length: " +
                    std::to_string(y_true.size()) + " vs " +
                    std::to_string(y_pred.size()));
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) cm.add(y_true[i], y_pred[i]);
  return cm;
}

ConfusionMatrix confusion_matrix(const std::vector<EmotionLabel>& y_true,
                                 const std::vector<EmotionLabel>& y_pred) {
  std::vector<std::size_t> t, p;
  t.reserve(y_true.size());
  p.reserve(y_pred.size());
  for (auto l : y_true) t.push_back(label_index(l));
  for (auto l : y_pred) p.push_back(label_index(l));
  return confusion_matrix(t, p, kNumLabels);
}

MetricReport compute_metrics(const ConfusionMatrix& cm, Averaging averaging) {
  if (cm.total() == 0) throw DataError("cannot compute metrics: no evaluated pairs");
  const std::size_t k = cm.num_classes();
  const double total = static_cast<double>(cm.total());

  MetricReport report;
  report.averaging = averaging;
  report.accuracy = static_cast<double>(cm.trace()) / total;
  report.per_label.resize(k);

  double p_sum = 0, r_sum = 0, f_sum = 0;
  for (std::size_t c = 0; c < k; ++c) {
    auto& m = report.per_label[c];
    const double diag = static_cast<double>(cm.at(c, c));
    const std::size_t col = cm.column_sum(c);
    m.support = cm.row_sum(c);
    m.precision = col == 0 ? 0.0 : diag / static_cast<double>(col);
    m.recall = m.support == 0 ? 0.0 : diag / static_cast<double>(m.support);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    const double w =
        averaging == Averaging::kWeighted ? static_cast<double>(m.support) : 1.0;
    p_sum += w * m.precision;
    r_sum += w * m.recall;
    f_sum += w * m.f1;
  }
  const double norm = averaging == Averaging::kWeighted ? total : static_cast<double>(k);
  report.precision = p_sum / norm;
  report.f1 = f_sum / norm;
  // support * (diag / support) is diag, so the weighted recall is
  // trace / total; summing diag directly keeps it bit-equal to accuracy.
  report.recall = averaging == Averaging::kWeighted ? report.accuracy : r_sum / norm;
  return report;
}

}  // namespace emoflow
