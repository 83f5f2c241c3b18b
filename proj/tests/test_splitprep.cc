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
#include <set>

#include "doctest.h"
#include "emoflow/csv.h"
#include "emoflow/rng.h"
#include "emoflow/splitprep.h"
#include "test_util.h"

using namespace emoflow;
using emoflow::testing::synthetic_corpus;
using emoflow::testing::TempDir;

namespace {

// Hand oracle: floor each share, then hand out the leftover one at a time
// by descending fractional part, earlier split first on ties.
std::array<std::size_t, 3> oracle_counts(std::size_t n, std::array<double, 3> r) {
  std::array<std::size_t, 3> out{};
  std::array<double, 3> frac{};
  std::size_t used = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = r[i] * static_cast<double>(n);
    out[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    frac[i] = exact - static_cast<double>(out[i]);
    used += out[i];
  }
  while (used < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (frac[i] > frac[best] + 1e-12) best = i;
    }
    ++out[best];
    frac[best] = -1;
    ++used;
  }
  return out;
}

void check_partition(const LabeledDataset& ds, const DatasetSplits& s) {
  CHECK(s.train.size() + s.validation.size() + s.test.size() == ds.size());
  std::set<std::string> seen;
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (const auto& r : part->records()) {
      CHECK(seen.insert(r.id).second);
      REQUIRE(ds.find(r.id) != nullptr);
      CHECK(*ds.find(r.id) == r);
    }
  }
}

}  // namespace

TEST_SUITE("splitprep") {
  TEST_CASE("largest remainder matches the hand oracle") {
    const std::vector<std::array<double, 3>> ratios = {
        {0.8, 0.1, 0.1}, {0.7, 0.15, 0.15}, {0.6, 0.2, 0.2}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    for (const auto& r : ratios) {
      for (std::size_t n = 0; n < 200; ++n) {
        const auto got = largest_remainder_counts(n, SplitRatios{r[0], r[1], r[2]});
        CHECK(got == oracle_counts(n, r));
        CHECK(got[0] + got[1] + got[2] == n);
      }
    }
  }

  TEST_CASE("balanced fixture of 8850 splits to 7080 / 885 / 885") {
    const auto ds = synthetic_corpus({1770, 1770, 1770, 1770, 1770}, 3);
    const auto s = stratified_split(ds, SplitRatios{}, 42);
    CHECK(s.train.size() == 7080);
    CHECK(s.validation.size() == 885);
    CHECK(s.test.size() == 885);
    check_partition(ds, s);
  }

  TEST_CASE("everything to train with ratios (1, 0, 0)") {
    const auto ds = synthetic_corpus({2, 1, 5, 3, 1}, 3);
    const auto s = stratified_split(ds, SplitRatios{1, 0, 0}, 1);
    CHECK(s.train.size() == ds.size());
    CHECK(s.validation.empty());
    CHECK(s.test.empty());
  }

  TEST_CASE("two-label fixture splits evenly per label") {
    const auto ds = synthetic_corpus({10, 10, 0, 0, 0}, 3);
    const auto s = stratified_split(ds, SplitRatios{}, 5);
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
      CHECK(part->count(EmotionLabel::kHappy) == part->count(EmotionLabel::kAnger));
    }
    CHECK(s.train.count(EmotionLabel::kHappy) == 8);
  }

  TEST_CASE("invalid ratios and tiny labels are rejected") {
    const auto ds = synthetic_corpus({10, 2, 10, 10, 10}, 3);
    CHECK_THROWS_AS(stratified_split(ds, SplitRatios{}, 1), DataError);
    CHECK_THROWS_AS(stratified_split(ds, SplitRatios{0.8, 0.1, 0.2}, 1), ConfigError);
    CHECK_THROWS_AS(stratified_split(ds, SplitRatios{1.1, -0.1, 0}, 1), ConfigError);
  }

  TEST_CASE("property: partition, stratification and determinism") {
    Rng meta(8);
    for (int trial = 0; trial < 40; ++trial) {
      LabelCounts counts{};
      for (auto& c : counts) c = 3 + meta.below(60);
      const auto ds = synthetic_corpus(counts, meta.next());
      const SplitRatios ratios{0.8, 0.1, 0.1};
      const std::uint64_t seed = meta.next();
      const auto s = stratified_split(ds, ratios, seed);
      check_partition(ds, s);
      const double r[3] = {ratios.train, ratios.validation, ratios.test};
      const LabeledDataset* parts[3] = {&s.train, &s.validation, &s.test};
      for (auto l : kAllLabels) {
        for (int p = 0; p < 3; ++p) {
          const double expect = r[p] * static_cast<double>(ds.count(l));
          CHECK(std::abs(static_cast<double>(parts[p]->count(l)) - expect) <= 1.0);
        }
      }
      const auto again = stratified_split(ds, ratios, seed);
      CHECK(again.train == s.train);
      CHECK(again.validation == s.validation);
      CHECK(again.test == s.test);
    }
  }

  TEST_CASE("whitespace tokenizer batches pad and mask") {
    WhitespaceHashTokenizer tok;
    const auto batch = tokenize_batch({"a b", "a"}, tok, 16);
    REQUIRE(batch.rows() == 2);
    CHECK(batch.padded_length() == 2);
    CHECK(batch.attention_mask[0] == std::vector<std::uint8_t>{1, 1});
    CHECK(batch.attention_mask[1] == std::vector<std::uint8_t>{1, 0});
    CHECK(batch.token_ids[0][0] == batch.token_ids[1][0]);
    CHECK(batch.token_ids[1][1] == tok.pad_id());

    CHECK(tokenize_batch({}, tok, 16).rows() == 0);

    const auto long_batch = tokenize_batch({"a b c d e f g h"}, tok, 5);
    CHECK(long_batch.token_ids[0].size() == 5);
    CHECK(long_batch.attention_mask[0] == std::vector<std::uint8_t>(5, 1));
  }

  TEST_CASE("tokenize_dataset carries labels and a stable fingerprint") {
    const auto ds = synthetic_corpus({2, 2, 2, 2, 2}, 1);
    WhitespaceHashTokenizer tok;
    const auto a = tokenize_dataset(ds, tok);
    const auto b = tokenize_dataset(ds, tok);
    REQUIRE(a.labels.has_value());
    CHECK(a.labels->size() == ds.size());
    CHECK(batch_fingerprint(a) == batch_fingerprint(b));
    CHECK(batch_fingerprint(a) != batch_fingerprint(tokenize_dataset(ds, tok, 2)));
  }

  TEST_CASE("wordpiece tokenizer from a vocabulary directory") {
    TempDir tmp("wp");
    csv::write_file(tmp.path() / "vocab.txt",
                    "[PAD]\n[UNK]\n[CLS]\n[SEP]\nbarang\nbag\n##us\nse\n##kali\n!\n");
    csv::write_file(tmp.path() / "tokenizer_config.json", R"({"do_lower_case": true})");
    const auto tok = WordPieceTokenizer::from_directory(tmp.path());
    CHECK(tok.tokenize("Barang BAGUS sekali!") ==
          std::vector<std::string>{"barang", "bag", "##us", "se", "##kali", "!"});
    CHECK(tok.tokenize("xyz") == std::vector<std::string>{"[UNK]"});
    const auto ids = tok.encode("barang bagus", 16);
    CHECK(ids == std::vector<std::int32_t>{2, 4, 5, 6, 3});
    // Truncation keeps the closing separator.
    CHECK(tok.encode("barang bagus", 3) == std::vector<std::int32_t>{2, 4, 3});
    CHECK(tok.encode("", 8) == std::vector<std::int32_t>{2, 3});
    CHECK(tok.min_sequence_length() == 2);
    CHECK_THROWS_AS(tokenize_batch({"x"}, tok, 1), ConfigError);
    CHECK_THROWS_AS(WordPieceTokenizer::from_directory(tmp.path() / "none"), IoError);
  }
}
