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

#ifndef EMOFLOW_EXPERIMENT_H_
#define EMOFLOW_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emoflow/augment.h"
#include "emoflow/corpus.h"
#include "emoflow/ensemble.h"
#include "emoflow/error.h"
#include "emoflow/finetune.h"
#include "emoflow/metrics.h"
#include "emoflow/models.h"
#include "emoflow/preprocess.h"
#include "emoflow/serialize.h"
#include "emoflow/splitprep.h"
#include "emoflow/translate.h"
#include "emoflow/tuner.h"

namespace emoflow {

inline constexpr int kConfigSchemaVersion = 1;

enum class BalanceMode { kNone, kUndersample, kAugment };
enum class RunKind { kTrain, kTune, kBag };

std::string_view balance_mode_name(BalanceMode mode);
BalanceMode parse_balance_mode(std::string_view name);
std::string_view run_kind_name(RunKind kind);
RunKind parse_run_kind(std::string_view name);

struct CleanSettings {
  std::string stopwords_path;  // required when remove_stopwords is set
  // Stopwords are kept by default: that dataset variant scored higher.
  bool remove_stopwords = false;
  bool filter_alphabet = true;
  bool lowercase = true;
  std::vector<CleanStage> stage_order = CleanConfig{}.stage_order;

  bool operator==(const CleanSettings&) const = default;
};

struct TranslatorSettings {
  std::string kind = "dictionary";  // echo | dictionary | http
  // Direction ("id-en", "en-id", "id-ar", "ar-id") -> two-column file.
  std::map<std::string, std::string> tables;
  HttpBackendConfig http;
  RetryPolicy retry;
  std::size_t parallel_width = 4;

  bool operator==(const TranslatorSettings&) const = default;
};

struct BalanceSettings {
  BalanceMode mode = BalanceMode::kNone;
  std::optional<std::size_t> target;
  std::vector<AugmentationMethod> method_cycle = default_method_cycle();
  std::string lexicon_path;
  double synonym_rate = 0.1;
  // Augment the pre-cleaning text and clean the outputs.
  bool augment_raw = false;
  TranslatorSettings translator;

  bool operator==(const BalanceSettings&) const = default;
};

struct TokenizerSettings {
  std::string kind = "whitespace-hash";  // whitespace-hash | wordpiece
  std::string directory;                 // wordpiece assets
  std::size_t max_length = kDefaultMaxLength;

  bool operator==(const TokenizerSettings&) const = default;
};

struct BackendSettings {
  std::string kind = "baseline";  // baseline | finetune
  double alpha = 1.0;
  FineTuneSettings finetune;

  bool operator==(const BackendSettings&) const = default;
};

struct TrainSection {
  std::string backend;
  TrainConfig config;
  bool operator==(const TrainSection&) const = default;
};

struct TuneSection {
  std::string backend;
  TrainConfig base;
  Grid grid = default_tuning_grid();
  std::size_t processes = 1;
  bool operator==(const TuneSection&) const = default;
};

struct BagSection {
  // MemberSpec::backend_id names an entry of ExperimentConfig::backends.
  EnsembleConfig ensemble;
  bool operator==(const BagSection&) const = default;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "experiment";
  std::string dataset;
  ColumnMap columns;
  CleanSettings clean;
  BalanceSettings balance;
  SplitRatios split;
  std::uint64_t seed = 42;
  TokenizerSettings tokenizer;
  std::map<std::string, BackendSettings> backends = {{"baseline", {}}};
  std::optional<TrainSection> train;
  std::optional<TuneSection> tune;
  std::optional<BagSection> bag;
  Averaging averaging = Averaging::kWeighted;
  std::string output_dir = "runs";

  // Exactly one of train / tune / bag must be set.
  RunKind kind() const;
  void validate() const;
  // --seed: replaces the global seed, every TrainConfig seed and the
  // ensemble base seed.
  void override_seed(std::uint64_t new_seed);

  bool operator==(const ExperimentConfig&) const = default;
};

Json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& j);
std::string render_config(const ExperimentConfig& config);
ExperimentConfig parse_config(std::string_view text);
// Parses and resolves relative input paths against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
// Content hash of the rendered config; names the run directory.
std::string config_hash(const ExperimentConfig& config);

// An error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorKind kind, const std::string& message)
      : Error(kind, stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Exit status for a failed stage; 0 is success, 1 an unclassified failure.
int exit_code_for_stage(std::string_view stage);

struct RunRecord {
  std::string run_id;  // "<UTC timestamp>-<config hash>"
  std::string config_hash;
  std::string created_at;
  std::string status;  // running | completed | failed
  RunKind kind = RunKind::kTrain;
  Json config_snapshot;
  std::map<std::string, std::string> fingerprints;
  std::map<std::string, std::size_t> sizes;
  std::map<std::string, EpochLog> epoch_logs;
  std::optional<MetricReport> test_metrics;
  std::optional<double> test_loss;
  std::optional<TuneResult> tune;
  std::string model_name;
  std::vector<std::string> member_names;
  std::vector<int> member_epochs;
  std::map<std::string, std::string> artifacts;
  std::string failed_stage;
  std::string error;
};

Json run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const Json& j);
RunRecord load_run(const std::filesystem::path& run_dir);

struct RunOptions {
  // Replace an existing completed run with the same config hash.
  bool overwrite = false;
  // Optional created_at override (tests); empty uses the clock.
  std::string timestamp;
};

// Builds the classifier named in config.backends.
std::unique_ptr<ClassifierBackend> make_backend(const BackendSettings& settings,
                                                const std::filesystem::path& work_dir);
std::unique_ptr<TranslationBackend> make_translation_backend(
    const TranslatorSettings& settings);
std::unique_ptr<Tokenizer> make_tokenizer(const TokenizerSettings& settings);

// load -> clean -> balance -> split -> tokenize -> train|tune|bag ->
// evaluate. The run lives in <output_dir>/<config hash>/; a failure keeps
// the partial directory, marks run.json failed and throws StageError.
RunRecord run_experiment(const ExperimentConfig& config,
                         const RunOptions& options = {});

// Individual pipeline stages, shared with the CLI.
CleanConfig make_clean_config(const CleanSettings& settings);
LabeledDataset balance_dataset(const LabeledDataset& dataset,
                               const BalanceSettings& settings,
                               const CleanConfig& clean, std::uint64_t seed,
                               const std::filesystem::path& cache_dir);

struct Evaluation {
  MetricReport report;
  double loss = 0;  // mean test cross-entropy
};

// Scores a dataset with the model(s) persisted in a completed train or bag
// run directory.
Evaluation evaluate_run(const std::filesystem::path& run_dir,
                        const LabeledDataset& dataset);

struct WarmStats {
  std::size_t texts = 0;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
};

// Round-trips every text through the pivot so later balance runs hit the
// translation cache in <cache_dir>/translations.tsv.
WarmStats warm_translation_cache(const TranslatorSettings& settings,
                                 PivotLanguage pivot,
                                 const std::vector<std::string>& texts,
                                 const std::filesystem::path& cache_dir);

// Emits table3.csv, table4.csv (single-model runs), table5.csv (tuning
// runs), table7.csv (ensembles) and per_label.csv into report_dir. Runs are
// looked up under output_dir by run id or config hash.
std::vector<std::filesystem::path> render_report(
    const std::filesystem::path& output_dir, const std::vector<std::string>& run_ids,
    const std::filesystem::path& report_dir);

// Table formatters, shared by run directories and reports.
std::string format_table3(const std::vector<RunRecord>& runs);
std::string format_table4(const std::vector<RunRecord>& runs);
std::string format_table5(const std::vector<RunRecord>& runs);
std::string format_table7(const std::vector<RunRecord>& runs);
std::string format_per_label(const std::vector<RunRecord>& runs);
std::string format_curves(const std::map<std::string, EpochLog>& logs);

}  // namespace emoflow

#endif  // EMOFLOW_EXPERIMENT_H_
