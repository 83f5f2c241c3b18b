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
#include "emoflow/error.h"
#include "emoflow/metrics.h"
#include "emoflow/rng.h"

using namespace emoflow;

namespace {

struct Brute {
  double accuracy, precision, recall, f1;
};

// Recomputes every metric from the raw label pairs by counting, without
// building a confusion matrix.
Brute brute_force(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p,
                  std::size_t k, bool weighted) {
  const double n = static_cast<double>(t.size());
  double correct = 0;
  for (std::size_t i = 0; i < t.size(); ++i) correct += t[i] == p[i];
  Brute out{correct / n, 0, 0, 0};
  double present = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double tp = 0, pred = 0, support = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      tp += t[i] == c && p[i] == c;
      pred += p[i] == c;
      support += t[i] == c;
    }
    const double prec = pred > 0 ? tp / pred : 0;
    const double rec = support > 0 ? tp / support : 0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0;
    const double w = weighted ? support / n : 1.0;
    out.precision += w * prec;
    out.recall += w * rec;
    out.f1 += w * f1;
    present += 1;
  }
  if (!weighted) {
    out.precision /= present;
    out.recall /= present;
    out.f1 /= present;
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("perfect predictions give a diagonal matrix and unit metrics") {
    const std::vector<EmotionLabel> y = {EmotionLabel::kHappy, EmotionLabel::kFear,
                                         EmotionLabel::kLove, EmotionLabel::kFear};
    const auto cm = confusion_matrix(y, y);
    for (std::size_t i = 0; i < kNumLabels; ++i) {
      for (std::size_t j = 0; j < kNumLabels; ++j) {
        if (i != j) CHECK(cm.at(i, j) == 0);
      }
    }
    const auto m = compute_metrics(cm);
    CHECK(m.accuracy == 1.0);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
  }

  TEST_CASE("hand tally") {
    const std::vector<std::size_t> t = {0, 0, 1}, p = {0, 1, 1};
    const auto cm = confusion_matrix(t, p);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(1, 1) == 1);
    CHECK(cm.total() == 3);
    CHECK_THROWS_AS(confusion_matrix(std::vector<std::size_t>{0},
                                     std::vector<std::size_t>{}),
                    DataError);
  }

  TEST_CASE("empty inputs give a zero matrix and metrics refuse it") {
    const auto cm = confusion_matrix(std::vector<EmotionLabel>{}, std::vector<EmotionLabel>{});
    CHECK(cm.total() == 0);
    CHECK_THROWS_AS(compute_metrics(cm), DataError);
  }

  TEST_CASE("three-class matrix by hand") {
    const auto cm = ConfusionMatrix::from_rows({{2, 1, 0}, {0, 3, 0}, {1, 0, 3}});
    const auto m = compute_metrics(cm);
    CHECK(m.accuracy == doctest::Approx(0.8));
    CHECK(m.recall == m.accuracy);
    // Precision per class: 2/3, 3/4, 3/3; recall: 2/3, 3/3, 3/4.
    const double p0 = 2.0 / 3, p1 = 0.75, p2 = 1.0;
    const double r0 = 2.0 / 3, r1 = 1.0, r2 = 0.75;
    const double f0 = 2 * p0 * r0 / (p0 + r0), f1 = 2 * p1 * r1 / (p1 + r1),
                 f2 = 2 * p2 * r2 / (p2 + r2);
    CHECK(m.precision == doctest::Approx(0.3 * p0 + 0.3 * p1 + 0.4 * p2));
    CHECK(m.f1 == doctest::Approx(0.3 * f0 + 0.3 * f1 + 0.4 * f2));
    const auto macro = compute_metrics(cm, Averaging::kMacro);
    CHECK(macro.precision == doctest::Approx((p0 + p1 + p2) / 3));
    CHECK(macro.recall == doctest::Approx((r0 + r1 + r2) / 3));
    REQUIRE(m.per_label.size() == 3);
    CHECK(m.per_label[2].support == 4);
  }

  TEST_CASE("empty predicted column gives zero precision") {
    const auto cm = ConfusionMatrix::from_rows({{2, 0}, {1, 0}});
    const auto m = compute_metrics(cm);
    CHECK(m.per_label[1].precision == 0.0);
    CHECK(m.per_label[1].f1 == 0.0);
  }

  TEST_CASE("property: brute-force oracle and recall identity") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + rng.below(300);
      std::vector<std::size_t> t(n), p(n);
      const bool skew = trial % 3 == 0;
      for (std::size_t i = 0; i < n; ++i) {
        t[i] = skew ? rng.below(2) * 4 : rng.below(kNumLabels);
        p[i] = rng.uniform() < 0.6 ? t[i] : rng.below(kNumLabels);
      }
      const auto cm = confusion_matrix(t, p);
      for (bool weighted : {true, false}) {
        const auto m = compute_metrics(cm, weighted ? Averaging::kWeighted : Averaging::kMacro);
        const auto b = brute_force(t, p, kNumLabels, weighted);
        CHECK(std::abs(m.accuracy - b.accuracy) <= 1e-12);
        CHECK(std::abs(m.precision - b.precision) <= 1e-12);
        CHECK(std::abs(m.recall - b.recall) <= 1e-12);
        CHECK(std::abs(m.f1 - b.f1) <= 1e-12);
        for (double v : {m.accuracy, m.precision, m.recall, m.f1}) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
        for (const auto& l : m.per_label) {
          CHECK(l.f1 <= std::max(l.precision, l.recall) + 1e-15);
        }
        if (weighted) CHECK(m.recall == m.accuracy);
      }
    }
  }
}
