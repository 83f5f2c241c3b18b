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

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "emoflow/baseline.h"
#include "emoflow/csv.h"
#include "emoflow/experiment.h"
#include "emoflow/hash.h"
#include "emoflow/rng.h"

namespace emoflow {
namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

// "2026-10-14T08:30:00Z" -> "20261014T083000Z".
std::string compact_timestamp(const std::string& iso) {
  std::string out;
  for (char c : iso) {
    if (c != '-' && c != ':') out.push_back(c);
  }
  return out;
}

Json metric_report_to_json(const MetricReport& m) {
  Json per_label = Json::array();
  for (std::size_t i = 0; i < m.per_label.size(); ++i) {
    const auto& l = m.per_label[i];
    per_label.push_back({{"label", std::string(label_name(label_from_index(i)))},
                         {"precision", l.precision},
                         {"recall", l.recall},
                         {"f1", l.f1},
                         {"support", l.support}});
  }
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"averaging", m.averaging == Averaging::kWeighted ? "weighted" : "macro"},
          {"per_label", per_label}};
}

MetricReport metric_report_from_json(const Json& j) {
  MetricReport m;
  m.accuracy = j.at("accuracy").get<double>();
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.averaging = j.at("averaging").get<std::string>() == "macro" ? Averaging::kMacro
                                                               : Averaging::kWeighted;
  for (const auto& l : j.at("per_label")) {
    m.per_label.push_back({l.at("precision").get<double>(), l.at("recall").get<double>(),
                           l.at("f1").get<double>(), l.at("support").get<std::size_t>()});
  }
  return m;
}

Json tune_row_to_json(const TuneRow& r) {
  Json j = {{"cell_index", r.cell_index},
            {"config", to_json(r.config)},
            {"eval_loss", r.eval_loss},
            {"eval_accuracy", r.eval_accuracy},
            {"test_accuracy", r.test_accuracy ? Json(*r.test_accuracy) : Json(nullptr)},
            {"wall_time_seconds", r.wall_time_seconds},
            {"selected_epoch", r.selected_epoch},
            {"log", to_json(r.log)}};
  if (r.error) j["error"] = *r.error;
  return j;
}

TuneRow tune_row_from_json(const Json& j) {
  TuneRow r;
  r.cell_index = j.at("cell_index").get<std::size_t>();
  r.config = train_config_from_json(j.at("config"));
  r.eval_loss = j.at("eval_loss").get<double>();
  r.eval_accuracy = j.at("eval_accuracy").get<double>();
  if (!j.at("test_accuracy").is_null()) r.test_accuracy = j["test_accuracy"].get<double>();
  r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  r.selected_epoch = j.at("selected_epoch").get<int>();
  r.log = epoch_log_from_json(j.at("log"));
  if (j.contains("error")) r.error = j["error"].get<std::string>();
  return r;
}

Json tune_to_json(const TuneResult& t) {
  Json rows = Json::array();
  Json failed = Json::array();
  for (const auto& r : t.rows) rows.push_back(tune_row_to_json(r));
  for (const auto& r : t.failed) failed.push_back(tune_row_to_json(r));
  return {{"model_name", t.model_name}, {"rows", rows}, {"failed", failed}, {"best", t.best}};
}

TuneResult tune_from_json(const Json& j) {
  TuneResult t;
  t.model_name = j.at("model_name").get<std::string>();
  for (const auto& r : j.at("rows")) t.rows.push_back(tune_row_from_json(r));
  for (const auto& r : j.at("failed")) t.failed.push_back(tune_row_from_json(r));
  t.best = j.at("best").get<std::size_t>();
  return t;
}

std::string stage_fingerprint(const std::string& input_fp, const Json& stage_config,
                              const std::string& output_fp) {
  return Fnv1a().field(input_fp).field(stage_config.dump()).field(output_fp).hex();
}

std::string format_exact(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

// Runs one stage, converting library errors to StageError.
template <typename F>
auto run_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.kind(), e.what());
  } catch (const nlohmann::json::exception& e) {
    throw StageError(stage, ErrorKind::kData, e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, ErrorKind::kIo, e.what());
  }
}

void write_run(const fs::path& run_dir, const RunRecord& record) {
  csv::write_file(run_dir / "run.json", run_record_to_json(record).dump(2) + "\n");
}

std::string metrics_csv(const MetricReport& m, std::optional<double> loss) {
  std::string out = csv::format_row(
      {"averaging", "accuracy", "precision", "recall", "f1", "loss"});
  out += csv::format_row({m.averaging == Averaging::kWeighted ? "weighted" : "macro",
                          format_exact(m.accuracy), format_exact(m.precision),
                          format_exact(m.recall), format_exact(m.f1),
                          loss ? format_exact(*loss) : std::string()});
  return out;
}

Evaluation evaluate_probabilities(const std::vector<ProbabilityVector>& probs,
                                  const LabeledDataset& test, Averaging averaging) {
  std::vector<EmotionLabel> predicted;
  predicted.reserve(probs.size());
  for (const auto& p : probs) predicted.push_back(argmax_label(p));
  const auto labels = test.labels();
  Evaluation e;
  e.report = compute_metrics(confusion_matrix(labels, predicted), averaging);
  e.loss = evaluate_loss_accuracy(probs, labels).loss;
  return e;
}

fs::path resolve_work_dir(const fs::path& run_dir, const fs::path& work_dir) {
  return work_dir.is_absolute() ? work_dir : run_dir / work_dir;
}

}  // namespace

int exit_code_for_stage(std::string_view stage) {
  if (stage == "config") return 2;
  if (stage == "load") return 3;
  if (stage == "clean") return 4;
  if (stage == "balance") return 5;
  if (stage == "split" || stage == "tokenize") return 6;
  if (stage == "train" || stage == "tune" || stage == "bag") return 7;
  if (stage == "evaluate") return 8;
  if (stage == "report") return 9;
  return 1;
}

Json run_record_to_json(const RunRecord& r) {
  Json logs = Json::object();
  for (const auto& [name, log] : r.epoch_logs) logs[name] = to_json(log);
  Json j = {{"run_id", r.run_id},
            {"config_hash", r.config_hash},
            {"created_at", r.created_at},
            {"status", r.status},
            {"kind", std::string(run_kind_name(r.kind))},
            {"config", r.config_snapshot},
            {"fingerprints", r.fingerprints},
            {"sizes", r.sizes},
            {"epoch_logs", logs},
            {"test_metrics",
             r.test_metrics ? metric_report_to_json(*r.test_metrics) : Json(nullptr)},
            {"test_loss", r.test_loss ? Json(*r.test_loss) : Json(nullptr)},
            {"tune", r.tune ? tune_to_json(*r.tune) : Json(nullptr)},
            {"model_name", r.model_name},
            {"member_names", r.member_names},
            {"member_epochs", r.member_epochs},
            {"artifacts", r.artifacts},
            {"failed_stage", r.failed_stage},
            {"error", r.error}};
  return j;
}

RunRecord run_record_from_json(const Json& j) {
  try {
    RunRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.created_at = j.at("created_at").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.kind = parse_run_kind(j.at("kind").get<std::string>());
    r.config_snapshot = j.at("config");
    r.fingerprints = j.at("fingerprints").get<std::map<std::string, std::string>>();
    r.sizes = j.at("sizes").get<std::map<std::string, std::size_t>>();
    for (const auto& item : j.at("epoch_logs").items()) {
      r.epoch_logs[item.key()] = epoch_log_from_json(item.value());
    }
    if (!j.at("test_metrics").is_null()) {
      r.test_metrics = metric_report_from_json(j["test_metrics"]);
    }
    if (!j.at("test_loss").is_null()) r.test_loss = j["test_loss"].get<double>();
    if (!j.at("tune").is_null()) r.tune = tune_from_json(j["tune"]);
    r.model_name = j.at("model_name").get<std::string>();
    r.member_names = j.at("member_names").get<std::vector<std::string>>();
    r.member_epochs = j.at("member_epochs").get<std::vector<int>>();
    r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    r.failed_stage = j.at("failed_stage").get<std::string>();
    r.error = j.at("error").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed run record: ") + e.what());
  }
}

RunRecord load_run(const fs::path& run_dir) {
  const auto path = run_dir / "run.json";
  Json j = Json::parse(csv::read_file(path), nullptr, false);
  if (j.is_discarded()) throw DataError("run record is not valid JSON: " + path.string());
  return run_record_from_json(j);
}

std::unique_ptr<ClassifierBackend> make_backend(const BackendSettings& settings,
                                                const fs::path& work_dir) {
  if (settings.kind == "baseline") {
    return std::make_unique<NaiveBayesBackend>(settings.alpha);
  }
  if (settings.kind == "finetune") {
    FineTuneSettings s = settings.finetune;
    s.work_dir = resolve_work_dir(work_dir, s.work_dir);
    return std::make_unique<FineTuneBackend>(std::move(s));
  }
  throw ConfigError("unknown backend kind '" + settings.kind + "'");
}

std::unique_ptr<TranslationBackend> make_translation_backend(
    const TranslatorSettings& settings) {
  if (settings.kind == "echo") return std::make_unique<EchoBackend>();
  if (settings.kind == "http") return std::make_unique<HttpBackend>(settings.http);
  if (settings.kind == "dictionary") {
    auto backend = std::make_unique<DictionaryBackend>();
    for (const auto& [direction, path] : settings.tables) {
      const auto dash = direction.find('-');
      if (dash == std::string::npos || dash == 0 || dash + 1 == direction.size()) {
        throw ConfigError("translator table key must look like 'id-en', got '" +
                          direction + "'");
      }
      backend->load_table(path, direction.substr(0, dash), direction.substr(dash + 1));
    }
    return backend;
  }
  throw ConfigError("unknown translator kind '" + settings.kind + "'");
}

std::unique_ptr<Tokenizer> make_tokenizer(const TokenizerSettings& settings) {
  if (settings.kind == "whitespace-hash") return std::make_unique<WhitespaceHashTokenizer>();
  if (settings.kind == "wordpiece") {
    return std::make_unique<WordPieceTokenizer>(
        WordPieceTokenizer::from_directory(settings.directory));
  }
  throw ConfigError("unknown tokenizer kind '" + settings.kind + "'");
}

CleanConfig make_clean_config(const CleanSettings& settings) {
  CleanConfig c;
  c.remove_stopwords = settings.remove_stopwords;
  c.filter_alphabet = settings.filter_alphabet;
  c.lowercase = settings.lowercase;
  c.stage_order = settings.stage_order;
  if (c.remove_stopwords) {
    if (settings.stopwords_path.empty()) {
      throw ConfigError("remove_stopwords needs a stopword list");
    }
    c.stopwords = load_stopwords(settings.stopwords_path);
  }
  c.validate();
  return c;
}

LabeledDataset balance_dataset(const LabeledDataset& dataset,
                               const BalanceSettings& settings,
                               const CleanConfig& clean, std::uint64_t seed,
                               const fs::path& cache_dir) {
  switch (settings.mode) {
    case BalanceMode::kNone:
      return dataset;
    case BalanceMode::kUndersample:
      return undersample(dataset, seed);
    case BalanceMode::kAugment:
      break;
  }

  auto backend = make_translation_backend(settings.translator);
  const std::string backend_id = backend->backend_id();

  Fnv1a key;
  key.field(dataset.fingerprint())
      .field(std::to_string(seed))
      .field(settings.target ? std::to_string(*settings.target) : "auto")
      .field(std::to_string(settings.synonym_rate))
      .field(settings.augment_raw ? "raw" : "clean")
      .field(backend_id);
  for (auto m : settings.method_cycle) key.field(method_name(m));
  if (!settings.lexicon_path.empty()) {
    key.field(hash_hex(csv::read_file(settings.lexicon_path)));
  }
  if (settings.augment_raw) {
    for (auto s : clean.stage_order) {
      if (clean.enabled(s)) key.field(stage_name(s));
    }
    std::vector<std::string> words(clean.stopwords.begin(), clean.stopwords.end());
    std::sort(words.begin(), words.end());
    for (const auto& w : words) key.field(w);
  }
  const fs::path cached = cache_dir / ("balanced-" + key.hex() + ".csv");
  if (fs::exists(cached)) return read_saved_dataset(cached);

  TranslationCache cache(cache_dir / "translations.tsv");
  Translator translator(*backend, cache, settings.translator.retry);

  AugmenterSet augmenters;
  for (auto m : settings.method_cycle) {
    if (augmenters.count(m)) continue;
    Augmenter a;
    switch (m) {
      case AugmentationMethod::kBtEn:
        a = make_back_translation_augmenter(translator, PivotLanguage::kEnglish);
        break;
      case AugmentationMethod::kBtAr:
        a = make_back_translation_augmenter(translator, PivotLanguage::kArabic);
        break;
      case AugmentationMethod::kSynonym:
        a = make_synonym_augmenter(load_lexicon(settings.lexicon_path),
                                   settings.synonym_rate);
        break;
    }
    if (settings.augment_raw) {
      a = [inner = std::move(a), &clean](const ReviewRecord& source,
                                         Rng& rng) -> std::optional<std::string> {
        ReviewRecord raw = source;
        if (source.raw_text) raw.text = *source.raw_text;
        auto out = inner(raw, rng);
        if (!out) return std::nullopt;
        auto cleaned = clean_pipeline(*out, clean);
        if (cleaned.empty()) return std::nullopt;
        return cleaned;
      };
    }
    augmenters[m] = std::move(a);
  }

  Rng rng(seed);
  const auto plan = plan_balance(dataset, settings.target, settings.method_cycle);
  LabeledDataset balanced = execute_plan(dataset, plan, augmenters, rng);
  save_dataset(balanced, cached);
  return balanced;
}

Evaluation evaluate_run(const fs::path& run_dir, const LabeledDataset& dataset) {
  const auto record = load_run(run_dir);
  if (record.status != "completed") {
    throw DataError("run " + record.run_id + " is not completed");
  }
  const auto config = config_from_json(record.config_snapshot);
  const auto averaging = config.averaging;
  const auto texts = dataset.texts();
  switch (record.kind) {
    case RunKind::kTrain: {
      const auto backend = make_backend(config.backends.at(config.train->backend), run_dir);
      const auto model = backend->load(run_dir / "model");
      return evaluate_probabilities(predict_proba(*model, texts), dataset, averaging);
    }
    case RunKind::kBag: {
      BaggedEnsemble ensemble;
      ensemble.config = config.bag->ensemble;
      for (std::size_t i = 0; i < ensemble.config.members.size(); ++i) {
        const auto& member = ensemble.config.members[i];
        const auto backend = make_backend(config.backends.at(member.backend_id), run_dir);
        ensemble.members.push_back(backend->load(run_dir / "members" / std::to_string(i)));
      }
      const auto pred = predict_ensemble(ensemble, texts);
      return evaluate_probabilities(pred.probabilities, dataset, averaging);
    }
    case RunKind::kTune:
      break;
  }
  throw ConfigError("tuning runs keep no model to evaluate; train the chosen cell");
}

WarmStats warm_translation_cache(const TranslatorSettings& settings, PivotLanguage pivot,
                                 const std::vector<std::string>& texts,
                                 const fs::path& cache_dir) {
  auto backend = make_translation_backend(settings);
  TranslationCache cache(cache_dir / "translations.tsv");
  Translator translator(*backend, cache, settings.retry);
  translator.round_trip_many(texts, pivot, settings.parallel_width);
  return {texts.size(), translator.backend_calls(), translator.cache_hits()};
}

RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  run_stage("config", [&] { config.validate(); });

  RunRecord record;
  record.config_hash = config_hash(config);
  record.created_at = options.timestamp.empty() ? utc_now() : options.timestamp;
  record.run_id = compact_timestamp(record.created_at) + "-" + record.config_hash;
  record.kind = config.kind();
  record.config_snapshot = config_to_json(config);
  record.status = "running";

  const fs::path out_dir(config.output_dir);
  const fs::path run_dir = out_dir / record.config_hash;
  const fs::path cache_dir = out_dir / "cache";
  run_stage("config", [&] {
    if (fs::exists(run_dir / "run.json") && !options.overwrite) {
      const auto previous = load_run(run_dir);
      if (previous.status == "completed") {
        throw ConfigError("run " + previous.run_id + " already exists in " +
                          run_dir.string() + "; pass --overwrite to replace it");
      }
    }
    fs::create_directories(run_dir);
    csv::write_file(run_dir / "config.json", render_config(config));
  });
  record.artifacts["config"] = "config.json";
  write_run(run_dir, record);

  try {
    const auto raw = run_stage("load", [&] { return load_dataset(config.dataset, config.columns); });
    record.sizes["load"] = raw.size();
    record.fingerprints["load"] = stage_fingerprint(
        hash_hex(csv::read_file(config.dataset)),
        {{"text_column", config.columns.text_column},
         {"label_column", config.columns.label_column}},
        raw.fingerprint());

    CleanConfig clean_config;
    const auto cleaned = run_stage("clean", [&] {
      clean_config = make_clean_config(config.clean);
      auto result = clean_dataset(raw, clean_config);
      return result.dataset;
    });
    record.sizes["clean"] = cleaned.size();
    {
      Json clean_json = record.config_snapshot["clean"];
      if (config.clean.remove_stopwords) {
        clean_json["stopwords"] = hash_hex(csv::read_file(config.clean.stopwords_path));
      }
      record.fingerprints["clean"] = stage_fingerprint(record.fingerprints["load"],
                                                       clean_json, cleaned.fingerprint());
    }

    const auto balanced = run_stage("balance", [&] {
      return balance_dataset(cleaned, config.balance, clean_config, config.seed, cache_dir);
    });
    record.sizes["balance"] = balanced.size();
    {
      Json balance_json = record.config_snapshot["balance"];
      balance_json["seed"] = config.seed;
      record.fingerprints["balance"] = stage_fingerprint(
          record.fingerprints["clean"], balance_json, balanced.fingerprint());
    }
    run_stage("balance", [&] { save_dataset(balanced, run_dir / "data" / "balanced.csv"); });
    record.artifacts["balanced"] = "data/balanced.csv";

    const auto splits = run_stage("split", [&] {
      auto s = stratified_split(balanced, config.split, config.seed);
      save_dataset(s.train, run_dir / "data" / "train.csv");
      save_dataset(s.validation, run_dir / "data" / "validation.csv");
      save_dataset(s.test, run_dir / "data" / "test.csv");
      return s;
    });
    {
      Json split_json = record.config_snapshot["split"];
      split_json["seed"] = config.seed;
      const std::pair<const char*, const LabeledDataset*> parts[] = {
          {"train", &splits.train}, {"validation", &splits.validation}, {"test", &splits.test}};
      for (const auto& [name, ds] : parts) {
        record.sizes[std::string("split.") + name] = ds->size();
        record.fingerprints[std::string("split.") + name] = stage_fingerprint(
            record.fingerprints["balance"], split_json, ds->fingerprint());
        record.artifacts[name] = std::string("data/") + name + ".csv";
      }
    }

    run_stage("tokenize", [&] {
      const auto tokenizer = make_tokenizer(config.tokenizer);
      Json tok_json = record.config_snapshot["tokenizer"];
      tok_json["vocabulary_id"] = tokenizer->vocabulary_id();
      const std::pair<const char*, const LabeledDataset*> parts[] = {
          {"train", &splits.train}, {"validation", &splits.validation}, {"test", &splits.test}};
      for (const auto& [name, ds] : parts) {
        const auto batch = tokenize_dataset(*ds, *tokenizer, config.tokenizer.max_length);
        const std::string split_key = std::string("split.") + name;
        record.fingerprints[std::string("tokenize.") + name] = stage_fingerprint(
            record.fingerprints[split_key], tok_json, batch_fingerprint(batch));
        record.sizes[std::string("tokenize.") + name + ".padded_length"] =
            batch.padded_length();
      }
    });

    std::map<std::string, std::unique_ptr<ClassifierBackend>> backends;
    run_stage("config", [&] {
      for (const auto& [name, settings] : config.backends) {
        backends[name] = make_backend(settings, run_dir);
      }
    });

    switch (record.kind) {
      case RunKind::kTrain: {
        auto& backend = *backends.at(config.train->backend);
        record.model_name = backend.display_name();
        auto result = run_stage("train", [&] {
          auto r = fit(backend, splits.train, splits.validation, config.train->config);
          r.model->save(run_dir / "model");
          return r;
        });
        record.member_names = {config.train->backend};
        record.member_epochs = {config.train->config.epochs};
        record.epoch_logs[record.model_name] = result.log;
        record.artifacts["model"] = "model";
        const auto eval = run_stage("evaluate", [&] {
          return evaluate_probabilities(predict_proba(*result.model, splits.test.texts()),
                                        splits.test, config.averaging);
        });
        record.test_metrics = eval.report;
        record.test_loss = eval.loss;
        break;
      }
      case RunKind::kTune: {
        auto& backend = *backends.at(config.tune->backend);
        record.model_name = backend.display_name();
        TuneOptions opts;
        opts.processes = config.tune->processes;
        opts.test = &splits.test;
        auto result = run_stage("tune", [&] {
          return grid_search(backend, config.tune->grid, splits.train, splits.validation,
                             config.tune->base, config.seed, opts);
        });
        for (const auto& row : result.rows) {
          record.epoch_logs["cell-" + std::to_string(row.cell_index)] = row.log;
        }
        record.member_names = {config.tune->backend};
        record.tune = std::move(result);
        break;
      }
      case RunKind::kBag: {
        BackendRegistry registry;
        for (auto& [name, b] : backends) registry[name] = b.get();
        EnsembleConfig ens = config.bag->ensemble;
        auto bagged = run_stage("bag", [&] {
          auto e = fit_ensemble(ens, registry, splits.train, splits.validation);
          for (std::size_t i = 0; i < e.members.size(); ++i) {
            e.members[i]->save(run_dir / "members" / std::to_string(i));
          }
          return e;
        });
        std::vector<std::string> displays;
        for (std::size_t i = 0; i < ens.members.size(); ++i) {
          const auto& m = ens.members[i];
          record.member_names.push_back(m.backend_id);
          displays.push_back(backends.at(m.backend_id)->display_name());
          record.member_epochs.push_back(m.config.epochs);
          record.epoch_logs["member-" + std::to_string(i)] = bagged.member_logs[i];
        }
        bool same = true;
        for (const auto& d : displays) same = same && d == displays.front();
        if (same) {
          record.model_name = std::to_string(displays.size()) + " " + displays.front();
        } else {
          for (std::size_t i = 0; i < displays.size(); ++i) {
            record.model_name += (i ? " + " : "") + displays[i];
          }
        }
        record.artifacts["members"] = "members";
        const auto eval = run_stage("evaluate", [&] {
          const auto pred = predict_ensemble(bagged, splits.test.texts());
          return evaluate_probabilities(pred.probabilities, splits.test, config.averaging);
        });
        record.test_metrics = eval.report;
        record.test_loss = eval.loss;
        break;
      }
    }

    run_stage("evaluate", [&] {
      RunRecord done = record;
      done.status = "completed";
      const std::vector<RunRecord> one = {done};
      if (record.test_metrics) {
        csv::write_file(run_dir / "metrics.csv",
                        metrics_csv(*record.test_metrics, record.test_loss));
        csv::write_file(run_dir / "per_label.csv", format_per_label(one));
        record.artifacts["metrics"] = "metrics.csv";
        record.artifacts["per_label"] = "per_label.csv";
      }
      csv::write_file(run_dir / "curves.csv", format_curves(record.epoch_logs));
      record.artifacts["curves"] = "curves.csv";
      switch (record.kind) {
        case RunKind::kTrain:
          csv::write_file(run_dir / "table3.csv", format_table3(one));
          csv::write_file(run_dir / "table4.csv", format_table4(one));
          record.artifacts["table3"] = "table3.csv";
          record.artifacts["table4"] = "table4.csv";
          break;
        case RunKind::kTune:
          csv::write_file(run_dir / "table5.csv", format_table5(one));
          record.artifacts["table5"] = "table5.csv";
          break;
        case RunKind::kBag:
          csv::write_file(run_dir / "table7.csv", format_table7(one));
          record.artifacts["table7"] = "table7.csv";
          break;
      }
    });
  } catch (const StageError& e) {
    record.status = "failed";
    record.failed_stage = e.stage();
    record.error = e.what();
    write_run(run_dir, record);
    throw;
  }

  record.status = "completed";
  write_run(run_dir, record);
  return record;
}

}  // namespace emoflow
