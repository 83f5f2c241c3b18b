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

#ifndef EMOFLOW_SPLITPREP_H_
#define EMOFLOW_SPLITPREP_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emoflow/corpus.h"

namespace emoflow {

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;

  // Each ratio in [0, 1] and the sum within 1e-9 of one.
  void validate() const;
  bool operator==(const SplitRatios&) const = default;
};

struct DatasetSplits {
  LabeledDataset train;
  LabeledDataset validation;
  LabeledDataset test;
};

// Per label: seeded shuffle, then cut by largest-remainder rounding so each
// split's count is within one of ratio * label_total (remainder ties go to
// train, then validation, then test). Records keep dataset order in every
// split.
DatasetSplits stratified_split(const LabeledDataset& dataset,
                               const SplitRatios& ratios, std::uint64_t seed);

// Per label, the number of records that go to train/validation/test.
std::array<std::size_t, 3> largest_remainder_counts(std::size_t total,
                                                    const SplitRatios& ratios);

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  // Token ids including special markers, at most max_length of them.
  virtual std::vector<std::int32_t> encode(std::string_view text,
                                           std::size_t max_length) const = 0;
  virtual std::int32_t pad_id() const = 0;
  virtual std::string vocabulary_id() const = 0;
  // Length of the encoding of an empty text (special markers only).
  virtual std::size_t min_sequence_length() const = 0;
};

// Test tokenizer: whitespace tokens mapped to 1 + hash % vocab_size. No
// special markers; pad id 0.
class WhitespaceHashTokenizer : public Tokenizer {
 public:
  explicit WhitespaceHashTokenizer(std::uint32_t vocab_size = 30000)
      : vocab_size_(vocab_size) {}

  std::vector<std::int32_t> encode(std::string_view text,
                                   std::size_t max_length) const override;
  std::int32_t pad_id() const override { return 0; }
  std::string vocabulary_id() const override;
  std::size_t min_sequence_length() const override { return 0; }

 private:
  std::uint32_t vocab_size_;
};

// BERT-style WordPiece encoder over a published vocab.txt (IndoBERT and the
// Indonesian DistilBERT releases both ship one). Produces
// [CLS] pieces... [SEP], truncating pieces so [SEP] is always kept.
class WordPieceTokenizer : public Tokenizer {
 public:
  WordPieceTokenizer(std::vector<std::string> vocab, bool do_lower_case);

  // Reads vocab.txt and, when present, do_lower_case from
  // tokenizer_config.json.
  static WordPieceTokenizer from_directory(const std::filesystem::path& dir);

  std::vector<std::int32_t> encode(std::string_view text,
                                   std::size_t max_length) const override;
  std::int32_t pad_id() const override { return pad_id_; }
  std::string vocabulary_id() const override { return vocabulary_id_; }
  std::size_t min_sequence_length() const override { return 2; }

  std::vector<std::string> tokenize(std::string_view text) const;

 private:
  std::int32_t id_of(const std::string& piece) const;

  std::unordered_map<std::string, std::int32_t> vocab_;
  bool do_lower_case_;
  std::int32_t pad_id_ = 0;
  std::int32_t unk_id_ = 0;
  std::int32_t cls_id_ = 0;
  std::int32_t sep_id_ = 0;
  std::string vocabulary_id_;
};

struct EncodedBatch {
  std::vector<std::vector<std::int32_t>> token_ids;
  std::vector<std::vector<std::uint8_t>> attention_mask;
  std::optional<std::vector<std::size_t>> labels;
  std::size_t max_length = 0;

  std::size_t rows() const { return token_ids.size(); }
  std::size_t padded_length() const {
    return token_ids.empty() ? 0 : token_ids.front().size();
  }
};

inline constexpr std::size_t kDefaultMaxLength = 256;

// Encodes, truncates to max_length and pads every row to the longest
// encoded row of the batch.
EncodedBatch tokenize_batch(const std::vector<std::string>& texts,
                            const Tokenizer& tokenizer,
                            std::size_t max_length = kDefaultMaxLength);
EncodedBatch tokenize_dataset(const LabeledDataset& dataset,
                              const Tokenizer& tokenizer,
                              std::size_t max_length = kDefaultMaxLength);

// Content hash of a batch, for run records.
std::string batch_fingerprint(const EncodedBatch& batch);

}  // namespace emoflow

#endif  // EMOFLOW_SPLITPREP_H_
