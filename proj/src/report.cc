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

#include <iomanip>
#include <sstream>

#include "emoflow/csv.h"
#include "emoflow/experiment.h"

namespace emoflow {
namespace fs = std::filesystem;

namespace {

std::string fixed4(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

std::string plain(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

bool has_metrics(const RunRecord& r) {
  return r.status == "completed" && r.test_metrics.has_value();
}

std::string epochs_cell(const std::vector<int>& epochs) {
  if (epochs.empty()) return "";
  bool same = true;
  for (int e : epochs) same = same && e == epochs.front();
  if (same) return std::to_string(epochs.front());
  std::string out;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    out += (i ? "/" : "") + std::to_string(epochs[i]);
  }
  return out;
}

bool undersampled(const RunRecord& r) {
  const auto& snap = r.config_snapshot;
  return snap.contains("balance") && snap["balance"].value("mode", "") == "undersample";
}

// Accepts a run directory name (config hash) or a full run id.
fs::path find_run(const fs::path& output_dir, const std::string& id) {
  if (fs::exists(output_dir / id / "run.json")) return output_dir / id;
  if (fs::is_directory(output_dir)) {
    for (const auto& entry : fs::directory_iterator(output_dir)) {
      const auto candidate = entry.path() / "run.json";
      if (!fs::exists(candidate)) continue;
      if (load_run(entry.path()).run_id == id) return entry.path();
    }
  }
  throw DataError("unknown run id '" + id + "' under " + output_dir.string());
}

}  // namespace

std::string format_table3(const std::vector<RunRecord>& runs) {
  std::string out =
      csv::format_row({"Method", "Acc.", "Prec.", "Rec.", "F1", "Ep.", "US"});
  for (const auto& r : runs) {
    if (r.kind != RunKind::kTrain || !has_metrics(r)) continue;
    const auto& m = *r.test_metrics;
    out += csv::format_row({r.model_name, fixed4(m.accuracy), fixed4(m.precision),
                            fixed4(m.recall), fixed4(m.f1), epochs_cell(r.member_epochs),
                            undersampled(r) ? "Yes" : "No"});
  }
  return out;
}

std::string format_table4(const std::vector<RunRecord>& runs) {
  std::string out =
      csv::format_row({"Model", "Epoch", "Loss", "Acc.", "Prec.", "Rec.", "F1"});
  for (const auto& r : runs) {
    if (r.kind != RunKind::kTrain || !has_metrics(r)) continue;
    const auto& m = *r.test_metrics;
    out += csv::format_row({r.model_name, epochs_cell(r.member_epochs),
                            r.test_loss ? fixed4(*r.test_loss) : "", fixed4(m.accuracy),
                            fixed4(m.precision), fixed4(m.recall), fixed4(m.f1)});
  }
  return out;
}

std::string format_table5(const std::vector<RunRecord>& runs) {
  // Eval columns are validation-split values; test accuracy is reported
  // separately so the two are never conflated.
  std::string out = csv::format_row({"Model", "Epochs", "Dropout", "Weight Decay",
                                     "Batch Size", "Eval Loss", "Eval Accuracy",
                                     "Test Accuracy"});
  for (const auto& r : runs) {
    if (r.kind != RunKind::kTune || r.status != "completed" || !r.tune) continue;
    for (const auto& row : r.tune->rows) {
      out += csv::format_row(
          {r.tune->model_name, std::to_string(row.config.epochs),
           plain(row.config.dropout_probability), plain(row.config.weight_decay),
           std::to_string(row.config.batch_size), fixed4(row.eval_loss),
           fixed4(row.eval_accuracy),
           row.test_accuracy ? fixed4(*row.test_accuracy) : ""});
    }
  }
  return out;
}

std::string format_table7(const std::vector<RunRecord>& runs) {
  std::string out =
      csv::format_row({"Model Combination", "Accuracy", "F1-Score", "Epoch"});
  for (const auto& r : runs) {
    if (r.kind != RunKind::kBag || !has_metrics(r)) continue;
    const auto& m = *r.test_metrics;
    out += csv::format_row({r.model_name, fixed4(m.accuracy), fixed4(m.f1),
                            epochs_cell(r.member_epochs)});
  }
  return out;
}

std::string format_per_label(const std::vector<RunRecord>& runs) {
  std::string out = csv::format_row(
      {"Run", "Model", "Label", "Precision", "Recall", "F1", "Support"});
  for (const auto& r : runs) {
    if (!has_metrics(r)) continue;
    const auto& per = r.test_metrics->per_label;
    for (std::size_t i = 0; i < per.size(); ++i) {
      out += csv::format_row({r.run_id, r.model_name,
                              std::string(label_name(label_from_index(i))),
                              fixed4(per[i].precision), fixed4(per[i].recall),
                              fixed4(per[i].f1), std::to_string(per[i].support)});
    }
  }
  return out;
}

std::string format_curves(const std::map<std::string, EpochLog>& logs) {
  std::string out = csv::format_row(
      {"Model", "Epoch", "Train Loss", "Validation Loss", "Validation Accuracy"});
  for (const auto& [name, log] : logs) {
    for (const auto& e : log) {
      out += csv::format_row({name, std::to_string(e.epoch), fixed4(e.train_loss),
                              fixed4(e.validation_loss), fixed4(e.validation_accuracy)});
    }
  }
  return out;
}

std::vector<fs::path> render_report(const fs::path& output_dir,
                                    const std::vector<std::string>& run_ids,
                                    const fs::path& report_dir) {
  std::vector<RunRecord> runs;
  for (const auto& id : run_ids) runs.push_back(load_run(find_run(output_dir, id)));

  const std::pair<const char*, std::string> files[] = {
      {"table3.csv", format_table3(runs)},   {"table4.csv", format_table4(runs)},
      {"table5.csv", format_table5(runs)},   {"table7.csv", format_table7(runs)},
      {"per_label.csv", format_per_label(runs)},
  };
  std::vector<fs::path> written;
  for (const auto& [name, content] : files) {
    const auto path = report_dir / name;
    csv::write_file(path, content);
    written.push_back(path);
  }
  return written;
}

}  // namespace emoflow
