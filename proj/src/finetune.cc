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

#include "emoflow/finetune.h"

#include <fstream>

#include "emoflow/csv.h"
#include "emoflow/error.h"
#include "emoflow/hash.h"
#include "emoflow/serialize.h"
#include "process.h"

namespace emoflow {
namespace {

constexpr const char* kMetadataFile = "emoflow_metadata.json";

std::string jsonl(const LabeledDataset& data) {
  std::string out;
  for (const auto& r : data.records()) {
    out += Json{{"id", r.id}, {"text", r.text}, {"label", label_index(r.label)}}
               .dump() +
           "\n";
  }
  return out;
}

Json label_names() {
  Json names = Json::array();
  for (auto l : kAllLabels) names.push_back(std::string(label_name(l)));
  return names;
}

void run_runner(const FineTuneSettings& s, const std::filesystem::path& job) {
  std::map<std::string, std::string> env;
  if (!s.python_path.empty()) {
    const char* existing = std::getenv("PYTHONPATH");
    env["PYTHONPATH"] = s.python_path + (existing ? std::string(":") + existing : "");
  }
  const int status =
      run_process({s.python, "-m", s.runner_module, job.string()}, env);
  if (status != 0) {
    throw TrainingError("fine-tune runner exited with status " +
                        std::to_string(status) + " (job " + job.string() + ")");
  }
}

Json read_json(const std::filesystem::path& path) {
  auto j = Json::parse(csv::read_file(path), nullptr, false);
  if (j.is_discarded()) throw TrainingError("unreadable runner output " + path.string());
  return j;
}

}  // namespace

FineTunedModel::FineTunedModel(std::filesystem::path checkpoint_dir,
                               FineTuneSettings settings, ModelMetadata metadata)
    : checkpoint_dir_(std::move(checkpoint_dir)),
      settings_(std::move(settings)),
      metadata_(std::move(metadata)) {}

std::vector<ProbabilityVector> FineTunedModel::predict_proba(
    const std::vector<std::string>& texts) const {
  if (texts.empty()) return {};
  Fnv1a h;
  for (const auto& t : texts) h.field(t);
  const auto dir = checkpoint_dir_.parent_path() / ("predict-" + h.hex());
  std::string lines;
  for (const auto& t : texts) lines += Json{{"text", t}}.dump() + "\n";
  csv::write_file(dir / "texts.jsonl", lines);
  const Json job = {{"mode", "predict"},
                    {"model_dir", checkpoint_dir_.string()},
                    {"input_file", (dir / "texts.jsonl").string()},
                    {"output_file", (dir / "probs.json").string()},
                    {"max_length", settings_.max_length},
                    {"device", settings_.device}};
  csv::write_file(dir / "job.json", job.dump(2));
  run_runner(settings_, dir / "job.json");

  const Json probs = read_json(dir / "probs.json");
  std::vector<ProbabilityVector> out;
  out.reserve(texts.size());
  for (const auto& row : probs) {
    if (row.size() != kNumLabels) throw TrainingError("runner returned a non 5-way vector");
    ProbabilityVector p{};
    for (std::size_t i = 0; i < kNumLabels; ++i) p[i] = row[i].get<double>();
    out.push_back(p);
  }
  return out;
}

void FineTunedModel::save(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  if (fs::exists(dir) && fs::equivalent(dir, checkpoint_dir_)) return;
  fs::create_directories(dir);
  fs::copy(checkpoint_dir_, dir,
           fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

FineTuneBackend::FineTuneBackend(FineTuneSettings settings)
    : settings_(std::move(settings)) {
  if (settings_.encoder_name.empty()) throw ConfigError("encoder_name is empty");
}

std::string FineTuneBackend::backend_id() const {
  return "finetune-" + settings_.encoder_name;
}

FitResult FineTuneBackend::fit(const LabeledDataset& train,
                               const LabeledDataset& validation,
                               const TrainConfig& config) {
  namespace fs = std::filesystem;
  if (settings_.model_dir.empty() || !fs::exists(settings_.model_dir)) {
    throw ConfigError("pretrained model directory not found: " +
                      settings_.model_dir.string());
  }
  const std::string key = Fnv1a()
                              .field(train.fingerprint())
                              .field(validation.fingerprint())
                              .field(to_json(config).dump())
                              .field(fs::absolute(settings_.model_dir).string())
                              .field(std::to_string(settings_.max_length))
                              .hex();
  const fs::path job_dir = fs::absolute(settings_.work_dir) / ("fit-" + key);
  const fs::path checkpoint = job_dir / "checkpoint";
  csv::write_file(job_dir / "train.jsonl", jsonl(train));
  csv::write_file(job_dir / "validation.jsonl", jsonl(validation));
  const Json job = {{"mode", "train"},
                    {"model_dir", fs::absolute(settings_.model_dir).string()},
                    {"output_dir", checkpoint.string()},
                    {"result_file", (job_dir / "result.json").string()},
                    {"train_file", (job_dir / "train.jsonl").string()},
                    {"validation_file", (job_dir / "validation.jsonl").string()},
                    {"max_length", settings_.max_length},
                    {"device", settings_.device},
                    {"labels", label_names()},
                    {"config", to_json(config)}};
  csv::write_file(job_dir / "job.json", job.dump(2));
  run_runner(settings_, job_dir / "job.json");

  const Json result = read_json(job_dir / "result.json");
  ModelMetadata meta{backend_id(), config, train.fingerprint()};
  csv::write_file(checkpoint / kMetadataFile, to_json(meta).dump(2));

  FitResult out;
  out.log = epoch_log_from_json(result.at("log"));
  out.selected_epoch = result.at("selected_epoch").get<int>();
  out.model = std::make_unique<FineTunedModel>(checkpoint, settings_, std::move(meta));
  return out;
}

std::unique_ptr<TrainedModel> FineTuneBackend::load(
    const std::filesystem::path& dir) const {
  auto meta = metadata_from_json(read_json(dir / kMetadataFile));
  return std::make_unique<FineTunedModel>(std::filesystem::absolute(dir), settings_,
                                          std::move(meta));
}

}  // namespace emoflow
