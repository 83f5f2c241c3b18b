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

#include <cmath>

#include "doctest.h"
#include "emoflow/baseline.h"
#include "emoflow/tuner.h"
#include "stub_backend.h"
#include "test_util.h"

using namespace emoflow;
using emoflow::testing::StubBackend;
using emoflow::testing::synthetic_corpus;

namespace {

const LabeledDataset& tiny() {
  static const auto ds = synthetic_corpus({3, 3, 3, 3, 3}, 1);
  return ds;
}

std::pair<double, double> bumpy(const TrainConfig& c) {
  const double acc = 0.5 + 0.02 * c.epochs - 0.3 * std::abs(c.dropout_probability - 0.3) +
                     0.1 * c.weight_decay - 0.001 * c.batch_size;
  return {acc, 1.0 - acc};
}

}  // namespace

TEST_SUITE("tuner") {
  TEST_CASE("grid cells are the full product in row-major order") {
    const auto grid = default_tuning_grid();
    CHECK(grid.size() == 36);
    const auto cells = grid.cells(TrainConfig{});
    REQUIRE(cells.size() == 36);
    CHECK(cells.front().epochs == 5);
    CHECK(cells.front().batch_size == 8);
    CHECK(cells[1].batch_size == 16);
    CHECK(cells.back().epochs == 10);
    CHECK(cells.back().dropout_probability == 0.5);
    CHECK(cells.back().weight_decay == 0.3);
    CHECK(cells.back().batch_size == 32);
    CHECK_THROWS_AS((Grid{{}, {0.1}, {0.0}, {8}}.validate()), ConfigError);
  }

  TEST_CASE("single-cell grid selects that cell") {
    StubBackend stub(bumpy);
    const auto r = grid_search(stub, Grid{{3}, {0.1}, {0.0}, {8}}, tiny(), tiny(), {}, 1);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.best_row().config.epochs == 3);
    CHECK(r.model_name == "Stub");
  }

  TEST_CASE("argmax of an injected accuracy function") {
    StubBackend stub(bumpy);
    const auto grid = default_tuning_grid();
    const auto r = grid_search(stub, grid, tiny(), tiny(), {}, 1);
    double best = -1;
    TrainConfig want;
    for (const auto& c : grid.cells({})) {
      if (bumpy(c).first > best) {
        best = bumpy(c).first;
        want = c;
      }
    }
    const auto& got = r.best_row().config;
    CHECK(got.epochs == want.epochs);
    CHECK(got.dropout_probability == want.dropout_probability);
    CHECK(got.weight_decay == want.weight_decay);
    CHECK(got.batch_size == want.batch_size);
    CHECK(r.best_row().eval_accuracy == best);
  }

  TEST_CASE("tie-break: loss, then epochs, then batch size") {
    StubBackend flat([](const TrainConfig& c) {
      return std::pair{0.7, c.dropout_probability > 0.2 ? 0.4 : 0.5};
    });
    const auto r = grid_search(flat, default_tuning_grid(), tiny(), tiny(), {}, 1);
    const auto& b = r.best_row().config;
    CHECK(b.dropout_probability > 0.2);
    CHECK(b.epochs == 5);
    CHECK(b.batch_size == 8);
    CHECK(b.dropout_probability == 0.3);
    CHECK(b.weight_decay == 0.01);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
      CHECK_FALSE(ranks_before(r.rows[i], r.rows[i - 1]));
    }
  }

  TEST_CASE("failed cells are recorded and excluded") {
    StubBackend stub(bumpy, {1, 0, 0, 0, 0},
                     [](const TrainConfig& c) { return c.batch_size == 32; });
    const auto grid = default_tuning_grid();
    const auto r = grid_search(stub, grid, tiny(), tiny(), {}, 1);
    CHECK(r.rows.size() == 24);
    CHECK(r.failed.size() == 12);
    for (const auto& f : r.failed) CHECK(f.error.has_value());
    const auto cells = grid.cells({});
    for (const auto& row : r.rows) {
      bool member = false;
      for (const auto& c : cells) {
        TrainConfig seeded = c;
        seeded.seed = 1;
        member = member || seeded == row.config;
      }
      CHECK(member);
    }
    StubBackend broken(bumpy, {1, 0, 0, 0, 0}, [](const TrainConfig&) { return true; });
    CHECK_THROWS_AS(grid_search(broken, grid, tiny(), tiny(), {}, 1), TrainingError);
  }

  TEST_CASE("seed override applies to every cell") {
    StubBackend stub(bumpy);
    TrainConfig base;
    base.seed = 5;
    const auto r = grid_search(stub, Grid{{1, 2}, {0.0}, {0.0}, {8}}, tiny(), tiny(), base, 77);
    for (const auto& row : r.rows) CHECK(row.config.seed == 77);
  }

  TEST_CASE("baseline reruns give identical tables, forked or not") {
    NaiveBayesBackend nb;
    const auto train = synthetic_corpus({8, 8, 8, 8, 8}, 3, false);
    const auto val = synthetic_corpus({3, 3, 3, 3, 3}, 4, false);
    const Grid grid{{1, 2}, {0.1, 0.3}, {0.0}, {8, 16}};
    TuneOptions seq;
    seq.test = &val;
    TuneOptions par = seq;
    par.processes = 3;
    const auto a = grid_search(nb, grid, train, val, {}, 9, seq);
    const auto b = grid_search(nb, grid, train, val, {}, 9, seq);
    const auto c = grid_search(nb, grid, train, val, {}, 9, par);
    REQUIRE(a.rows.size() == grid.size());
    for (const auto* other : {&b, &c}) {
      REQUIRE(other->rows.size() == a.rows.size());
      for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(other->rows[i].cell_index == a.rows[i].cell_index);
        CHECK(other->rows[i].config == a.rows[i].config);
        CHECK(other->rows[i].eval_loss == a.rows[i].eval_loss);
        CHECK(other->rows[i].eval_accuracy == a.rows[i].eval_accuracy);
        CHECK(other->rows[i].test_accuracy == a.rows[i].test_accuracy);
        CHECK(other->rows[i].log == a.rows[i].log);
      }
    }
  }
}
