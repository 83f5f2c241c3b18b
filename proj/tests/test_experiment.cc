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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "emoflow/baseline.h"
#include "emoflow/csv.h"
#include "emoflow/experiment.h"
#include "test_util.h"

using namespace emoflow;
using emoflow::testing::data_dir;
using emoflow::testing::synthetic_corpus;
using emoflow::testing::TempDir;
namespace fs = std::filesystem;

namespace {

ExperimentConfig fixture(const fs::path& out) {
  auto c = load_config(data_dir() / "experiment.json");
  c.output_dir = out.string();
  return c;
}

std::string slurp(const fs::path& p) { return csv::read_file(p); }

std::size_t data_rows(const std::string& csv_text) {
  std::size_t lines = 0;
  for (char ch : csv_text) lines += ch == '\n';
  return lines - 1;  // header
}

ExperimentConfig as_tune(ExperimentConfig c) {
  c.train.reset();
  TuneSection t;
  t.backend = "baseline";
  t.grid = Grid{{1, 2}, {0.1}, {0.01}, {8, 16}};
  c.tune = t;
  return c;
}

ExperimentConfig as_bag(ExperimentConfig c, std::size_t n) {
  c.train.reset();
  BagSection b;
  for (std::size_t i = 0; i < n; ++i) b.ensemble.members.push_back({"baseline", TrainConfig{}});
  b.ensemble.base_seed = 5;
  c.bag = b;
  return c;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config renders and parses back to an equal value") {
    const auto c = load_config(data_dir() / "experiment.json");
    CHECK(parse_config(render_config(c)) == c);
    CHECK(config_from_json(config_to_json(c)) == c);
    const auto t = as_tune(c);
    CHECK(parse_config(render_config(t)) == t);
    const auto b = as_bag(c, 3);
    CHECK(parse_config(render_config(b)) == b);
  }

  TEST_CASE("config validation rejects malformed documents") {
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 2, "train": {"backend": "baseline"}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    auto c = load_config(data_dir() / "experiment.json");
    auto two = as_tune(c);
    two.train = c.train;
    CHECK_THROWS_AS(two.validate(), ConfigError);
    auto missing = c;
    missing.train->backend = "nope";
    CHECK_THROWS_AS(missing.validate(), ConfigError);
    auto rate = c;
    rate.balance.synonym_rate = 0;
    CHECK_THROWS_AS(rate.validate(), ConfigError);
  }

  TEST_CASE("config hash ignores the output directory only") {
    auto a = load_config(data_dir() / "experiment.json");
    auto b = a;
    b.output_dir = "/elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 43;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 12);
  }

  TEST_CASE("seed override reaches every seeded component") {
    auto c = as_bag(load_config(data_dir() / "experiment.json"), 2);
    c.override_seed(9);
    CHECK(c.seed == 9);
    CHECK(c.bag->ensemble.base_seed == 9);
    for (const auto& m : c.bag->ensemble.members) CHECK(m.config.seed == 9);
  }

  TEST_CASE("end-to-end fixture run writes every artifact") {
    TempDir tmp("e2e");
    const auto rec = run_experiment(fixture(tmp.path()), {false, "2026-01-02T03:04:05Z"});
    CHECK(rec.status == "completed");
    CHECK(rec.run_id == "20260102T030405Z-" + rec.config_hash);
    for (const char* key : {"load", "clean", "balance", "split.train", "split.validation",
                            "split.test", "tokenize.train", "tokenize.validation",
                            "tokenize.test"}) {
      CHECK_MESSAGE(rec.fingerprints.count(key) == 1, key);
    }
    CHECK(rec.sizes.at("load") == 80);
    // Augmentation raises every label to the majority count.
    CHECK(rec.sizes.at("balance") == 150);
    CHECK(rec.sizes.at("split.train") + rec.sizes.at("split.validation") +
              rec.sizes.at("split.test") ==
          150);
    const fs::path dir = tmp.path() / rec.config_hash;
    for (const auto& [name, rel] : rec.artifacts) {
      CHECK_MESSAGE(fs::exists(dir / rel), name);
    }
    CHECK(fs::exists(dir / "table3.csv"));
    CHECK(data_rows(slurp(dir / "table3.csv")) == 1);
    CHECK(data_rows(slurp(dir / "per_label.csv")) == kNumLabels);
    // Baseline log: one row per configured epoch without early stopping.
    CHECK(rec.epoch_logs.at("NaiveBayes").size() == 4);
    const auto loaded = load_run(dir);
    CHECK(loaded.fingerprints == rec.fingerprints);
    CHECK(loaded.test_metrics->accuracy == rec.test_metrics->accuracy);

    const auto balanced = read_saved_dataset(dir / "data" / "balanced.csv");
    for (auto l : kAllLabels) CHECK(balanced.count(l) == 30);
  }

  TEST_CASE("identical config and seed give byte-identical metrics") {
    TempDir a("det-a"), b("det-b");
    const auto ra = run_experiment(fixture(a.path()));
    const auto rb = run_experiment(fixture(b.path()));
    CHECK(ra.fingerprints == rb.fingerprints);
    CHECK(slurp(a.path() / ra.config_hash / "metrics.csv") ==
          slurp(b.path() / rb.config_hash / "metrics.csv"));
    CHECK(slurp(a.path() / ra.config_hash / "data" / "train.csv") ==
          slurp(b.path() / rb.config_hash / "data" / "train.csv"));
    // Rerun over a warm cache in place.
    const auto rc = run_experiment(fixture(a.path()), {true, ""});
    CHECK(rc.fingerprints == ra.fingerprints);
    CHECK(slurp(a.path() / rc.config_hash / "metrics.csv") ==
          slurp(b.path() / rb.config_hash / "metrics.csv"));
  }

  TEST_CASE("fingerprints change exactly when upstream inputs change") {
    TempDir tmp("fp");
    const auto base = run_experiment(fixture(tmp.path()));

    auto reseeded = fixture(tmp.path());
    reseeded.seed = 7;
    const auto r2 = run_experiment(reseeded);
    CHECK(r2.fingerprints.at("load") == base.fingerprints.at("load"));
    CHECK(r2.fingerprints.at("clean") == base.fingerprints.at("clean"));
    CHECK(r2.fingerprints.at("split.train") != base.fingerprints.at("split.train"));

    auto unbalanced = fixture(tmp.path());
    unbalanced.balance.mode = BalanceMode::kNone;
    const auto r3 = run_experiment(unbalanced);
    CHECK(r3.fingerprints.at("clean") == base.fingerprints.at("clean"));
    CHECK(r3.fingerprints.at("balance") != base.fingerprints.at("balance"));

    // One edited review changes everything from load onwards.
    auto text = slurp(data_dir() / "reviews.csv");
    const auto pos = text.find('\n') + 1;
    text.insert(pos + text.substr(pos).find(','), " ");
    const auto edited = tmp.path() / "edited.csv";
    csv::write_file(edited, text);
    auto changed = fixture(tmp.path());
    changed.dataset = edited.string();
    const auto r4 = run_experiment(changed);
    CHECK(r4.fingerprints.at("load") != base.fingerprints.at("load"));
  }

  TEST_CASE("a completed run is only replaced with overwrite") {
    TempDir tmp("ow");
    run_experiment(fixture(tmp.path()));
    try {
      run_experiment(fixture(tmp.path()));
      FAIL("expected a refusal");
    } catch (const StageError& e) {
      CHECK(e.stage() == "config");
      CHECK(e.kind() == ErrorKind::kConfig);
    }
    CHECK(run_experiment(fixture(tmp.path()), {true, ""}).status == "completed");
  }

  TEST_CASE("a failing stage is recorded with its name") {
    TempDir tmp("fail");
    auto c = fixture(tmp.path());
    c.dataset = (tmp.path() / "absent.csv").string();
    try {
      run_experiment(c);
      FAIL("expected a load failure");
    } catch (const StageError& e) {
      CHECK(e.stage() == "load");
      CHECK(exit_code_for_stage(e.stage()) == 3);
    }
    const auto rec = load_run(tmp.path() / config_hash(c));
    CHECK(rec.status == "failed");
    CHECK(rec.failed_stage == "load");
    // A failed run does not block a retry.
    c.dataset = fixture(tmp.path()).dataset;
    CHECK_NOTHROW(run_experiment(c));
  }

  TEST_CASE("each stage maps to its own exit code") {
    CHECK(exit_code_for_stage("config") == 2);
    CHECK(exit_code_for_stage("load") == 3);
    CHECK(exit_code_for_stage("clean") == 4);
    CHECK(exit_code_for_stage("balance") == 5);
    CHECK(exit_code_for_stage("split") == 6);
    CHECK(exit_code_for_stage("tokenize") == 6);
    CHECK(exit_code_for_stage("train") == 7);
    CHECK(exit_code_for_stage("tune") == 7);
    CHECK(exit_code_for_stage("bag") == 7);
    CHECK(exit_code_for_stage("evaluate") == 8);
    CHECK(exit_code_for_stage("report") == 9);
  }

  TEST_CASE("report over zero runs is header-only") {
    TempDir tmp("rep0");
    const auto files = render_report(tmp.path(), {}, tmp.path() / "report");
    CHECK(files.size() == 5);
    for (const auto& f : files) CHECK(data_rows(slurp(f)) == 0);
    CHECK(slurp(tmp.path() / "report" / "table3.csv") == "Method,Acc.,Prec.,Rec.,F1,Ep.,US\n");
  }

  TEST_CASE("two runs differing only by seed give two table rows") {
    TempDir tmp("rep2");
    const auto a = run_experiment(fixture(tmp.path()));
    auto c = fixture(tmp.path());
    c.override_seed(99);
    const auto b = run_experiment(c);
    CHECK(a.config_hash != b.config_hash);
    render_report(tmp.path(), {a.run_id, b.config_hash}, tmp.path() / "report");
    CHECK(data_rows(slurp(tmp.path() / "report" / "table3.csv")) == 2);
    CHECK(data_rows(slurp(tmp.path() / "report" / "table4.csv")) == 2);
    CHECK(data_rows(slurp(tmp.path() / "report" / "per_label.csv")) == 2 * kNumLabels);
    CHECK_THROWS_AS(render_report(tmp.path(), {"no-such-run"}, tmp.path() / "r2"), DataError);
  }

  TEST_CASE("tuning run produces a ranked grid table") {
    TempDir tmp("tune");
    const auto rec = run_experiment(as_tune(fixture(tmp.path())));
    REQUIRE(rec.tune);
    CHECK(rec.tune->rows.size() == 4);
    CHECK_FALSE(rec.test_metrics);
    const auto table = slurp(tmp.path() / rec.config_hash / "table5.csv");
    CHECK(data_rows(table) == 4);
    CHECK(table.rfind("Model,Epochs,Dropout,Weight Decay,Batch Size,Eval Loss,Eval Accuracy", 0) ==
          0);
    CHECK_THROWS_AS(evaluate_run(tmp.path() / rec.config_hash,
                                 read_saved_dataset(tmp.path() / rec.config_hash / "data" /
                                                    "test.csv")),
                    ConfigError);
  }

  TEST_CASE("bagging run names the combination and reloads its members") {
    TempDir tmp("bag");
    const auto rec = run_experiment(as_bag(fixture(tmp.path()), 3));
    CHECK(rec.model_name == "3 NaiveBayes");
    const auto dir = tmp.path() / rec.config_hash;
    const auto table = slurp(dir / "table7.csv");
    CHECK(data_rows(table) == 1);
    CHECK(table.find("3 NaiveBayes") != std::string::npos);
    const auto test = read_saved_dataset(dir / "data" / "test.csv");
    const auto ev = evaluate_run(dir, test);
    CHECK(ev.report.accuracy == rec.test_metrics->accuracy);
    CHECK(ev.report.f1 == rec.test_metrics->f1);
  }

  TEST_CASE("evaluate reproduces the stored test metrics of a train run") {
    TempDir tmp("eval");
    const auto rec = run_experiment(fixture(tmp.path()));
    const auto dir = tmp.path() / rec.config_hash;
    const auto ev = evaluate_run(dir, read_saved_dataset(dir / "data" / "test.csv"));
    CHECK(ev.report.accuracy == rec.test_metrics->accuracy);
    CHECK(ev.loss == doctest::Approx(*rec.test_loss).epsilon(1e-12));
  }

  TEST_CASE("fine-tune backend drives an external runner over the job protocol") {
    TempDir tmp("ft");
    BackendSettings s;
    s.kind = "finetune";
    s.finetune.encoder_name = "FakeBERT";
    s.finetune.model_dir = data_dir();
    s.finetune.python = EMOFLOW_TEST_PYTHON;
    s.finetune.runner_module = "fake_finetune";
    s.finetune.python_path = (data_dir() / "fakerunner").string();
    s.finetune.work_dir = "jobs";
    auto backend = make_backend(s, tmp.path());
    CHECK(backend->display_name() == "FakeBERT");
    const auto train = synthetic_corpus({6, 3, 1, 0, 0}, 1);
    TrainConfig cfg;
    cfg.epochs = 3;
    auto fitted = fit(*backend, train, train, cfg);
    CHECK(fitted.log.size() == 3);
    CHECK(fitted.selected_epoch == 3);
    const auto probs = predict_proba(*fitted.model, {"a", "b"});
    REQUIRE(probs.size() == 2);
    CHECK(probs[0][0] == doctest::Approx(0.6));
    CHECK(probs[1][2] == doctest::Approx(0.1));
    fitted.model->save(tmp.path() / "saved");
    const auto reloaded = backend->load(tmp.path() / "saved");
    CHECK(reloaded->metadata() == fitted.model->metadata());
    CHECK(predict_proba(*reloaded, {"c"})[0] == probs[0]);

    setenv("FAKE_RUNNER_FAIL", "1", 1);
    CHECK_THROWS_AS(predict_proba(*reloaded, {"d"}), TrainingError);
    unsetenv("FAKE_RUNNER_FAIL");
  }
}
