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

#ifndef EMOFLOW_METRICS_H_
#define EMOFLOW_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emoflow/corpus.h"

namespace emoflow {

// K x K counts, rows = true label, columns = predicted label.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes = kNumLabels);
  // From explicit rows; all rows must have num_classes entries.
  static ConfusionMatrix from_rows(
      const std::vector<std::vector<std::size_t>>& rows);

  void add(std::size_t truth, std::size_t predicted, std::size_t n = 1);
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return cells_[truth * k_ + predicted];
  }
  std::size_t num_classes() const { return k_; }
  std::size_t total() const { return total_; }
  std::size_t row_sum(std::size_t truth) const;
  std::size_t column_sum(std::size_t predicted) const;
  std::size_t trace() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_;
  std::vector<std::size_t> cells_;
  std::size_t total_ = 0;
};

ConfusionMatrix confusion_matrix(std::span<const std::size_t> y_true,
                                 std::span<const std::size_t> y_pred,
                                 std::size_t num_classes = kNumLabels);
ConfusionMatrix confusion_matrix(const std::vector<EmotionLabel>& y_true,
                                 const std::vector<EmotionLabel>& y_pred);

enum class Averaging { kWeighted, kMacro };

struct LabelMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
};

struct MetricReport {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  Averaging averaging = Averaging::kWeighted;
  std::vector<LabelMetrics> per_label;
};

// accuracy = trace / total. Per class: precision = diag / column sum (0 for
// an empty column), recall = diag / row sum (0 for an empty row), F1 the
// harmonic mean (0 when both are 0). Aggregates are support-weighted means,
// or plain means under kMacro. Throws DataError on an empty matrix.
MetricReport compute_metrics(const ConfusionMatrix& cm,
                             Averaging averaging = Averaging::kWeighted);

}  // namespace emoflow

#endif  // EMOFLOW_METRICS_H_
