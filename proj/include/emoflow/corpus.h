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

#ifndef EMOFLOW_CORPUS_H_
#define EMOFLOW_CORPUS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emoflow {

// The five emotion classes. Enumerator order is the fixed label order used
// for every tie-break in the toolkit.
enum class EmotionLabel : std::uint8_t {
  kHappy = 0,
  kAnger = 1,
  kSadness = 2,
  kLove = 3,
  kFear = 4,
};

inline constexpr std::size_t kNumLabels = 5;
inline constexpr std::array<EmotionLabel, kNumLabels> kAllLabels = {
    EmotionLabel::kHappy, EmotionLabel::kAnger, EmotionLabel::kSadness,
    EmotionLabel::kLove, EmotionLabel::kFear};

inline constexpr std::size_t label_index(EmotionLabel label) {
  return static_cast<std::size_t>(label);
}
EmotionLabel label_from_index(std::size_t index);
std::string_view label_name(EmotionLabel label);

// Case-insensitive, whitespace-trimmed.
std::optional<EmotionLabel> try_parse_label(std::string_view text);
EmotionLabel parse_label(std::string_view text);

enum class AugmentationMethod : std::uint8_t { kBtEn, kBtAr, kSynonym };

std::string_view method_name(AugmentationMethod method);
AugmentationMethod parse_method(std::string_view name);

struct Provenance {
  enum class Kind : std::uint8_t { kOriginal, kAugmented, kResampled };

  Kind kind = Kind::kOriginal;
  std::optional<AugmentationMethod> method;  // set iff kind == kAugmented
  std::string source_id;                     // empty iff kind == kOriginal

  static Provenance original() { return {}; }
  static Provenance augmented(AugmentationMethod m, std::string source) {
    return {Kind::kAugmented, m, std::move(source)};
  }
  static Provenance resampled(std::string source) {
    return {Kind::kResampled, std::nullopt, std::move(source)};
  }

  bool operator==(const Provenance&) const = default;
};

struct ReviewRecord {
  std::string id;
  std::string text;
  EmotionLabel label = EmotionLabel::kHappy;
  Provenance provenance;
  // Text before cleaning, kept once clean_dataset has run.
  std::optional<std::string> raw_text;

  bool operator==(const ReviewRecord&) const = default;
};

using LabelCounts = std::array<std::size_t, kNumLabels>;

// Immutable, ordered record collection. Construction enforces non-empty
// texts and unique ids and builds the label-count index.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  explicit LabeledDataset(std::vector<ReviewRecord> records);

  const std::vector<ReviewRecord>& records() const { return records_; }
  const LabelCounts& label_counts() const { return counts_; }
  std::size_t count(EmotionLabel label) const {
    return counts_[label_index(label)];
  }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const ReviewRecord* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  std::vector<std::string> texts() const;
  std::vector<EmotionLabel> labels() const;

  // Content hash over ids, texts, labels and provenance, in order.
  std::string fingerprint() const;

  bool operator==(const LabeledDataset& other) const {
    return records_ == other.records_;
  }

 private:
  std::vector<ReviewRecord> records_;
  LabelCounts counts_{};
  std::unordered_map<std::string, std::size_t> index_;
};

LabelCounts count_labels(const std::vector<ReviewRecord>& records);
LabelCounts label_distribution(const LabeledDataset& dataset);

// Header names of the review-text and emotion columns in the public
// PRDECT-ID CSV release.
struct ColumnMap {
  std::string text_column = "Customer Review";
  std::string label_column = "Emotion";

  bool operator==(const ColumnMap&) const = default;
};

// Reads a comma-delimited table with a header row. Every data row becomes
// an original record whose id is its zero-based row index.
LabeledDataset load_dataset(const std::filesystem::path& path,
                            const ColumnMap& columns = {});
LabeledDataset parse_dataset(std::string_view content,
                             const ColumnMap& columns = {});

// Round-trippable dataset file (id,text,label,provenance,method,source_id,
// raw_text) used between CLI stages and for the balanced-dataset cache.
void save_dataset(const LabeledDataset& dataset,
                  const std::filesystem::path& path);
std::string format_dataset(const LabeledDataset& dataset);
LabeledDataset read_saved_dataset(const std::filesystem::path& path);
LabeledDataset parse_saved_dataset(std::string_view content);

}  // namespace emoflow

#endif  // EMOFLOW_CORPUS_H_
