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

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emoflow/csv.h"
#include "emoflow/experiment.h"

namespace fs = std::filesystem;
using namespace emoflow;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

ExperimentConfig resolve_config(const Globals& g) {
  ExperimentConfig c;
  if (!g.config_path.empty()) c = load_config(g.config_path);
  if (g.seed) c.override_seed(*g.seed);
  if (!g.out.empty()) c.output_dir = g.out;
  return c;
}

fs::path stage_dir(const ExperimentConfig& c) { return fs::path(c.output_dir) / "stages"; }

void print_counts(const std::string& what, const LabeledDataset& ds) {
  std::cout << what << ": " << ds.size() << " records";
  for (auto label : kAllLabels) {
    std::cout << "  " << label_name(label) << "=" << ds.count(label);
  }
  std::cout << "\n";
}

void print_metrics(const MetricReport& m, std::optional<double> loss) {
  std::cout << std::fixed << std::setprecision(4) << "accuracy=" << m.accuracy
            << " precision=" << m.precision << " recall=" << m.recall << " f1=" << m.f1;
  if (loss) std::cout << " loss=" << *loss;
  std::cout << "\n";
}

LabeledDataset read_stage_input(const std::string& input, const fs::path& fallback) {
  return read_saved_dataset(input.empty() ? fallback : fs::path(input));
}

// Maps library errors raised by a single-stage command to its exit class.
template <typename F>
int guarded(const std::string& stage, F&& body) {
  try {
    body();
    return 0;
  } catch (const StageError& e) {
    std::cerr << "emoflow: " << e.what() << "\n";
    return exit_code_for_stage(e.stage());
  } catch (const ConfigError& e) {
    std::cerr << "emoflow: config: " << e.what() << "\n";
    return exit_code_for_stage("config");
  } catch (const std::exception& e) {
    std::cerr << "emoflow: " << stage << ": " << e.what() << "\n";
    return exit_code_for_stage(stage);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emoflow: emotion classification experiment toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Override every seed in the config");
  app.add_option("--out", g.out, "Output directory (overrides output_dir)");

  std::string input;
  std::string text_col;
  std::string label_col;
  auto* load = app.add_subcommand("load", "Load and validate a raw labeled table");
  load->add_option("--input", input, "Delimited table with a header row");
  load->add_option("--text-col", text_col, "Review text column");
  load->add_option("--label-col", label_col, "Emotion label column");

  auto* clean = app.add_subcommand("clean", "Apply the cleaning pipeline");
  clean->add_option("--input", input, "Saved dataset (default: stages/dataset.csv)");

  std::string mode;
  std::optional<std::size_t> target;
  auto* balance = app.add_subcommand("balance", "Undersample or augment to equal counts");
  balance->add_option("--input", input, "Saved dataset (default: stages/clean.csv)");
  balance->add_option("--mode", mode, "none | undersample | augment");
  balance->add_option("--target", target, "Per-label target count");

  auto* split = app.add_subcommand("split", "Stratified train/validation/test split");
  split->add_option("--input", input, "Saved dataset (default: stages/balanced.csv)");

  bool overwrite = false;
  auto* train = app.add_subcommand("train", "Run the pipeline with a single TrainConfig");
  auto* tune = app.add_subcommand("tune", "Run the pipeline with a grid search");
  auto* bag = app.add_subcommand("bag", "Run the pipeline with a bagged ensemble");
  for (auto* cmd : {train, tune, bag}) {
    cmd->add_flag("--overwrite", overwrite, "Replace a completed run with the same config");
  }

  std::string run;
  auto* evaluate = app.add_subcommand("evaluate", "Score a dataset with a saved run");
  evaluate->add_option("--run", run, "Run directory or run id")->required();
  evaluate->add_option("--input", input, "Saved dataset (default: the run's test split)");

  std::vector<std::string> runs;
  std::string report_dir;
  auto* report = app.add_subcommand("report", "Collate result tables across runs");
  report->add_option("--runs", runs, "Run ids or config hashes");
  report->add_option("--report-dir", report_dir, "Destination (default: <out>/report)");

  auto* cache = app.add_subcommand("translate-cache", "Manage the translation cache");
  cache->require_subcommand(1);
  std::string pivot = "en";
  auto* warm = cache->add_subcommand("warm", "Pre-translate a dataset through a pivot");
  warm->add_option("--pivot", pivot, "en | ar")->check(CLI::IsMember({"en", "ar"}));
  warm->add_option("--input", input, "Saved dataset (default: stages/clean.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code_for_stage("config");
  }

  ExperimentConfig config;
  if (int rc = guarded("config", [&] { config = resolve_config(g); }); rc != 0) return rc;
  const fs::path stages = stage_dir(config);

  if (*load) {
    return guarded("load", [&] {
      ColumnMap columns = config.columns;
      if (!text_col.empty()) columns.text_column = text_col;
      if (!label_col.empty()) columns.label_column = label_col;
      const std::string path = input.empty() ? config.dataset : input;
      if (path.empty()) throw ConfigError("load needs --input or a config dataset");
      const auto ds = load_dataset(path, columns);
      save_dataset(ds, stages / "dataset.csv");
      print_counts("loaded", ds);
    });
  }
  if (*clean) {
    return guarded("clean", [&] {
      const auto ds = read_stage_input(input, stages / "dataset.csv");
      CleanConfig cc;
      try {
        cc = make_clean_config(config.clean);
      } catch (const Error& e) {
        throw StageError("config", e.kind(), e.what());
      }
      const auto result = clean_dataset(ds, cc);
      save_dataset(result.dataset, stages / "clean.csv");
      print_counts("cleaned", result.dataset);
      if (!result.dropped_ids.empty()) {
        std::cout << "dropped " << result.dropped_ids.size() << " records empty after cleaning\n";
      }
    });
  }
  if (*balance) {
    return guarded("balance", [&] {
      BalanceSettings settings = config.balance;
      if (!mode.empty()) settings.mode = parse_balance_mode(mode);
      if (target) settings.target = *target;
      const auto ds = read_stage_input(input, stages / "clean.csv");
      CleanConfig cc;
      if (settings.augment_raw) cc = make_clean_config(config.clean);
      const auto balanced = balance_dataset(ds, settings, cc, config.seed,
                                            fs::path(config.output_dir) / "cache");
      save_dataset(balanced, stages / "balanced.csv");
      print_counts("balanced", balanced);
    });
  }
  if (*split) {
    return guarded("split", [&] {
      const auto ds = read_stage_input(input, stages / "balanced.csv");
      const auto s = stratified_split(ds, config.split, config.seed);
      save_dataset(s.train, stages / "train.csv");
      save_dataset(s.validation, stages / "validation.csv");
      save_dataset(s.test, stages / "test.csv");
      print_counts("train", s.train);
      print_counts("validation", s.validation);
      print_counts("test", s.test);
    });
  }
  for (auto [cmd, kind] : {std::pair{train, RunKind::kTrain}, std::pair{tune, RunKind::kTune},
                           std::pair{bag, RunKind::kBag}}) {
    if (!*cmd) continue;
    return guarded(std::string(run_kind_name(kind)), [&, kind = kind] {
      if (g.config_path.empty()) throw ConfigError("this command needs --config");
      if (config.kind() != kind) {
        throw ConfigError("config describes a " + std::string(run_kind_name(config.kind())) +
                          " run, not " + std::string(run_kind_name(kind)));
      }
      RunOptions options;
      options.overwrite = overwrite;
      const auto record = run_experiment(config, options);
      std::cout << "run " << record.run_id << " -> "
                << (fs::path(config.output_dir) / record.config_hash).string() << "\n";
      if (record.test_metrics) print_metrics(*record.test_metrics, record.test_loss);
      if (record.tune) {
        const auto& best = record.tune->best_row();
        std::cout << "best cell " << best.cell_index << ": epochs=" << best.config.epochs
                  << " dropout=" << best.config.dropout_probability
                  << " weight_decay=" << best.config.weight_decay
                  << " batch_size=" << best.config.batch_size << std::fixed
                  << std::setprecision(4) << " eval_accuracy=" << best.eval_accuracy
                  << " eval_loss=" << best.eval_loss << "\n";
      }
    });
  }
  if (*evaluate) {
    return guarded("evaluate", [&] {
      fs::path run_dir = run;
      if (!fs::exists(run_dir / "run.json")) run_dir = fs::path(config.output_dir) / run;
      if (!fs::exists(run_dir / "run.json")) {
        throw DataError("no run found at '" + run + "'");
      }
      const auto ds = read_stage_input(input, run_dir / "data" / "test.csv");
      const auto eval = evaluate_run(run_dir, ds);
      print_metrics(eval.report, eval.loss);
    });
  }
  if (*report) {
    return guarded("report", [&] {
      const fs::path dest =
          report_dir.empty() ? fs::path(config.output_dir) / "report" : fs::path(report_dir);
      for (const auto& p : render_report(config.output_dir, runs, dest)) {
        std::cout << p.string() << "\n";
      }
    });
  }
  if (*warm) {
    return guarded("balance", [&] {
      const auto ds = read_stage_input(input, stages / "clean.csv");
      std::vector<std::string> texts;
      for (const auto& r : ds.records()) {
        texts.push_back(config.balance.augment_raw && r.raw_text ? *r.raw_text : r.text);
      }
      const auto stats =
          warm_translation_cache(config.balance.translator, parse_pivot(pivot), texts,
                                 fs::path(config.output_dir) / "cache");
      std::cout << "warmed " << stats.texts << " texts via " << pivot << ": "
                << stats.backend_calls << " backend calls, " << stats.cache_hits
                << " cache hits\n";
    });
  }
  return 1;
}
