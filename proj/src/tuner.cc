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

#include "emoflow/tuner.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <exception>

#include "emoflow/error.h"
#include "emoflow/serialize.h"

namespace emoflow {
namespace {

TuneRow run_cell(ClassifierBackend& backend, std::size_t index,
                 const TrainConfig& config, const LabeledDataset& train,
                 const LabeledDataset& validation, const LabeledDataset* test) {
  TuneRow row;
  row.cell_index = index;
  row.config = config;
  const auto start = std::chrono::steady_clock::now();
  try {
    FitResult fitted = fit(backend, train, validation, config);
    const auto& chosen = fitted.selected();
    row.eval_loss = chosen.validation_loss;
    row.eval_accuracy = chosen.validation_accuracy;
    row.selected_epoch = fitted.selected_epoch;
    row.log = fitted.log;
    if (test != nullptr && !test->empty()) {
      const auto probs = predict_proba(*fitted.model, test->texts());
      row.test_accuracy = evaluate_loss_accuracy(probs, test->labels()).accuracy;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

Json row_to_json(const TuneRow& row) {
  Json j = {{"cell_index", row.cell_index},
            {"config", to_json(row.config)},
            {"eval_loss", row.eval_loss},
            {"eval_accuracy", row.eval_accuracy},
            {"wall_time_seconds", row.wall_time_seconds},
            {"selected_epoch", row.selected_epoch},
            {"log", to_json(row.log)}};
  if (row.test_accuracy) j["test_accuracy"] = *row.test_accuracy;
  if (row.error) j["error"] = *row.error;
  return j;
}

TuneRow row_from_json(const Json& j) {
  TuneRow row;
  row.cell_index = j.at("cell_index").get<std::size_t>();
  row.config = train_config_from_json(j.at("config"));
  row.eval_loss = j.at("eval_loss").get<double>();
  row.eval_accuracy = j.at("eval_accuracy").get<double>();
  row.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  row.selected_epoch = j.at("selected_epoch").get<int>();
  row.log = epoch_log_from_json(j.at("log"));
  if (j.contains("test_accuracy")) row.test_accuracy = j["test_accuracy"].get<double>();
  if (j.contains("error")) row.error = j["error"].get<std::string>();
  return row;
}

struct Worker {
  pid_t pid;
  int fd;
  std::size_t index;
};

std::string drain(int fd) {
  std::string out;
  char buf[4096];
  while (true) {
    const ssize_t n = read(fd, buf, sizeof buf);
    if (n > 0) {
      out.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      break;
    }
  }
  close(fd);
  return out;
}

std::vector<TuneRow> run_forked(ClassifierBackend& backend,
                                const std::vector<TrainConfig>& cells,
                                const LabeledDataset& train,
                                const LabeledDataset& validation,
                                const LabeledDataset* test, std::size_t width) {
  std::vector<TuneRow> rows(cells.size());
  std::vector<Worker> active;
  std::size_t next = 0;

  auto finish = [&](const Worker& w) {
    const std::string payload = drain(w.fd);
    int status = 0;
    waitpid(w.pid, &status, 0);
    TuneRow row;
    auto parsed = Json::parse(payload, nullptr, false);
    if (!parsed.is_discarded() && WIFEXITED(status) && WEXITSTATUS(status) == 0) {
      row = row_from_json(parsed);
    } else {
      row.cell_index = w.index;
      row.config = cells[w.index];
      row.error = "worker process for cell " + std::to_string(w.index) + " failed";
    }
    rows[w.index] = std::move(row);
  };

  while (next < cells.size() || !active.empty()) {
    while (next < cells.size() && active.size() < width) {
      int fds[2];
      if (pipe(fds) != 0) throw IoError("pipe failed");
      const pid_t pid = fork();
      if (pid < 0) throw IoError("fork failed");
      if (pid == 0) {
        close(fds[0]);
        const std::string out =
            row_to_json(run_cell(backend, next, cells[next], train, validation, test))
                .dump();
        std::size_t written = 0;
        while (written < out.size()) {
          const ssize_t n = write(fds[1], out.data() + written, out.size() - written);
          if (n <= 0) _exit(1);
          written += static_cast<std::size_t>(n);
        }
        close(fds[1]);
        _exit(0);
      }
      close(fds[1]);
      active.push_back({pid, fds[0], next});
      ++next;
    }
    // Drain in launch order; results are placed by cell index either way.
    finish(active.front());
    active.erase(active.begin());
  }
  return rows;
}

}  // namespace

void Grid::validate() const {
  if (epochs.empty() || dropout.empty() || weight_decay.empty() || batch_size.empty()) {
    throw ConfigError("every grid dimension needs at least one value");
  }
}

std::vector<TrainConfig> Grid::cells(const TrainConfig& base) const {
  validate();
  std::vector<TrainConfig> out;
  out.reserve(size());
  for (int e : epochs) {
    for (double d : dropout) {
      for (double w : weight_decay) {
        for (int b : batch_size) {
          TrainConfig c = base;
          c.epochs = e;
          c.dropout_probability = d;
          c.weight_decay = w;
          c.batch_size = b;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

Grid default_tuning_grid() {
  return {{5, 10}, {0.1, 0.3, 0.5}, {0.01, 0.3}, {8, 16, 32}};
}

bool ranks_before(const TuneRow& a, const TuneRow& b) {
  if (a.eval_accuracy != b.eval_accuracy) return a.eval_accuracy > b.eval_accuracy;
  if (a.eval_loss != b.eval_loss) return a.eval_loss < b.eval_loss;
  if (a.config.epochs != b.config.epochs) return a.config.epochs < b.config.epochs;
  if (a.config.batch_size != b.config.batch_size) {
    return a.config.batch_size < b.config.batch_size;
  }
  return a.cell_index < b.cell_index;
}

TuneResult grid_search(ClassifierBackend& backend, const Grid& grid,
                       const LabeledDataset& train,
                       const LabeledDataset& validation, const TrainConfig& base,
                       std::uint64_t seed, const TuneOptions& options) {
  TrainConfig seeded = base;
  seeded.seed = seed;
  const auto cells = grid.cells(seeded);

  std::vector<TuneRow> all;
  if (options.processes <= 1) {
    all.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      all.push_back(run_cell(backend, i, cells[i], train, validation, options.test));
    }
  } else {
    all = run_forked(backend, cells, train, validation, options.test,
                     options.processes);
  }

  TuneResult result;
  result.model_name = backend.display_name();
  for (auto& row : all) {
    (row.error ? result.failed : result.rows).push_back(std::move(row));
  }
  if (result.rows.empty()) {
    throw TrainingError("all " + std::to_string(cells.size()) +
                        " grid cells failed; first error: " +
                        result.failed.front().error.value_or("?"));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), ranks_before);
  result.best = 0;
  return result;
}

}  // namespace emoflow
