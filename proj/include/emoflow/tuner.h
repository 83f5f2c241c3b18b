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

#ifndef EMOFLOW_TUNER_H_
#define EMOFLOW_TUNER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emoflow/models.h"

namespace emoflow {

struct Grid {
  std::vector<int> epochs;
  std::vector<double> dropout;
  std::vector<double> weight_decay;
  std::vector<int> batch_size;

  std::size_t size() const {
    return epochs.size() * dropout.size() * weight_decay.size() * batch_size.size();
  }
  void validate() const;
  // Cartesian product in row-major order (epochs outermost, batch size
  // innermost), each cell overriding base.
  std::vector<TrainConfig> cells(const TrainConfig& base) const;

  bool operator==(const Grid&) const = default;
};

// The 2 x 3 x 2 x 3 grid used for the published tuning tables.
Grid default_tuning_grid();

struct TuneRow {
  std::size_t cell_index = 0;
  TrainConfig config;
  double eval_loss = 0;
  double eval_accuracy = 0;
  // Filled when a test split is supplied.
  std::optional<double> test_accuracy;
  double wall_time_seconds = 0;
  int selected_epoch = 0;
  EpochLog log;
  std::optional<std::string> error;
};

struct TuneResult {
  std::string model_name;
  // Successful cells, best first.
  std::vector<TuneRow> rows;
  std::vector<TuneRow> failed;
  std::size_t best = 0;

  const TuneRow& best_row() const { return rows.at(best); }
};

// Higher eval accuracy first; ties by lower eval loss, fewer epochs, then
// smaller batch size, then grid order.
bool ranks_before(const TuneRow& a, const TuneRow& b);

struct TuneOptions {
  // 1 runs cells sequentially in this process. Larger values fork up to
  // that many worker processes; results are merged by cell index.
  std::size_t processes = 1;
  const LabeledDataset* test = nullptr;
};

// One fit per cell with base overridden by the cell and the seed fixed to
// `seed`. Eval loss/accuracy are the validation values of the epoch the
// returned model holds. Failed cells are kept in TuneResult::failed;
// throws TrainingError if every cell failed.
TuneResult grid_search(ClassifierBackend& backend, const Grid& grid,
                       const LabeledDataset& train,
                       const LabeledDataset& validation, const TrainConfig& base,
                       std::uint64_t seed, const TuneOptions& options = {});

}  // namespace emoflow

#endif  // EMOFLOW_TUNER_H_
