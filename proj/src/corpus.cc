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

#include "emoflow/corpus.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "emoflow/csv.h"
#include "emoflow/error.h"
#include "emoflow/hash.h"

namespace emoflow {
namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "Happy", "Anger", "Sadness", "Love", "Fear"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view provenance_kind_name(Provenance::Kind kind) {
  switch (kind) {
    case Provenance::Kind::kOriginal:
      return "original";
    case Provenance::Kind::kAugmented:
      return "augmented";
    case Provenance::Kind::kResampled:
      return "resampled";
  }
  return "original";
}

std::size_t column_position(const csv::Row& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw ConfigError("column '" + name + "' not found in header");
}

}  // namespace

EmotionLabel label_from_index(std::size_t index) {
  if (index >= kNumLabels) {
    throw DataError("label index out of range: " + std::to_string(index));
  }
  return static_cast<EmotionLabel>(index);
}

std::string_view label_name(EmotionLabel label) {
  return kLabelNames[label_index(label)];
}

std::optional<EmotionLabel> try_parse_label(std::string_view text) {
  text = trim(text);
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (iequals(text, kLabelNames[i])) return static_cast<EmotionLabel>(i);
  }
  return std::nullopt;
}

EmotionLabel parse_label(std::string_view text) {
  if (auto label = try_parse_label(text)) return *label;
  throw DataError("unknown emotion label '" + std::string(text) + "'");
}

std::string_view method_name(AugmentationMethod method) {
  switch (method) {
    case AugmentationMethod::kBtEn:
      return "BT_EN";
    case AugmentationMethod::kBtAr:
      return "BT_AR";
    case AugmentationMethod::kSynonym:
      return "SYNONYM";
  }
  return "BT_EN";
}

AugmentationMethod parse_method(std::string_view name) {
  name = trim(name);
  for (auto m : {AugmentationMethod::kBtEn, AugmentationMethod::kBtAr,
                 AugmentationMethod::kSynonym}) {
    if (iequals(name, method_name(m))) return m;
  }
  throw ConfigError("unknown augmentation method '" + std::string(name) + "'");
}

LabelCounts count_labels(const std::vector<ReviewRecord>& records) {
  LabelCounts counts{};
  for (const auto& r : records) ++counts[label_index(r.label)];
  return counts;
}

LabeledDataset::LabeledDataset(std::vector<ReviewRecord> records)
    : records_(std::move(records)) {
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.text.empty()) throw DataError("record '" + r.id + "' has empty text");
    if (!index_.emplace(r.id, i).second) {
      throw DataError("duplicate record id '" + r.id + "'");
    }
    ++counts_[label_index(r.label)];
  }
}

const ReviewRecord* LabeledDataset::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<std::string> LabeledDataset::texts() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.text);
  return out;
}

std::vector<EmotionLabel> LabeledDataset::labels() const {
  std::vector<EmotionLabel> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.label);
  return out;
}

std::string LabeledDataset::fingerprint() const {
  Fnv1a h;
  h.field(std::to_string(records_.size()));
  for (const auto& r : records_) {
    h.field(r.id).field(r.text).field(label_name(r.label));
    h.field(provenance_kind_name(r.provenance.kind));
    h.field(r.provenance.method ? method_name(*r.provenance.method) : "");
    h.field(r.provenance.source_id);
  }
  return h.hex();
}

LabelCounts label_distribution(const LabeledDataset& dataset) {
  return dataset.label_counts();
}

LabeledDataset parse_dataset(std::string_view content,
                             const ColumnMap& columns) {
  auto rows = csv::parse(content);
  if (rows.empty()) throw DataError("empty dataset: no header row");
  const auto& header = rows.front();
  const std::size_t text_col = column_position(header, columns.text_column);
  const std::size_t label_col = column_position(header, columns.label_column);
  if (rows.size() == 1) throw DataError("empty dataset");

  std::vector<ReviewRecord> records;
  records.reserve(rows.size() - 1);
  std::vector<std::string> problems;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::size_t row_number = i;  // 1-based data row
    const std::size_t needed = std::max(text_col, label_col) + 1;
    if (row.size() < needed) {
      problems.push_back("row " + std::to_string(row_number) + ": expected " +
                         std::to_string(needed) + " fields, got " +
                         std::to_string(row.size()));
      continue;
    }
    auto label = try_parse_label(row[label_col]);
    if (!label) {
      problems.push_back("row " + std::to_string(row_number) +
                         ": unparseable label '" + row[label_col] + "'");
      continue;
    }
    if (trim(row[text_col]).empty()) {
      problems.push_back("row " + std::to_string(row_number) + ": empty text");
      continue;
    }
    records.push_back({std::to_string(i - 1), row[text_col], *label,
                       Provenance::original(), std::nullopt});
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << problems.size() << " invalid row(s)";
    const std::size_t shown = std::min<std::size_t>(problems.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) msg << "; " << problems[i];
    if (shown < problems.size()) msg << "; ...";
    throw DataError(msg.str());
  }
  return LabeledDataset(std::move(records));
}

LabeledDataset load_dataset(const std::filesystem::path& path,
                            const ColumnMap& columns) {
  if (!std::filesystem::exists(path)) {
    throw IoError("dataset file not found: " + path.string());
  }
  return parse_dataset(csv::read_file(path), columns);
}

std::string format_dataset(const LabeledDataset& dataset) {
  std::string out = csv::format_row(
      {"id", "text", "label", "provenance", "method", "source_id", "raw_text"});
  for (const auto& r : dataset.records()) {
    out += csv::format_row(
        {r.id, r.text, std::string(label_name(r.label)),
         std::string(provenance_kind_name(r.provenance.kind)),
         r.provenance.method ? std::string(method_name(*r.provenance.method))
                             : std::string(),
         r.provenance.source_id, r.raw_text.value_or("")});
  }
  return out;
}

void save_dataset(const LabeledDataset& dataset,
                  const std::filesystem::path& path) {
  csv::write_file(path, format_dataset(dataset));
}

LabeledDataset parse_saved_dataset(std::string_view content) {
  auto rows = csv::parse(content);
  if (rows.empty() || rows.front().size() < 7 || rows.front()[0] != "id") {
    throw DataError("not a saved dataset file (missing header)");
  }
  std::vector<ReviewRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() < 7) {
      throw DataError("saved dataset row " + std::to_string(i) +
                      " has too few fields");
    }
    ReviewRecord r;
    r.id = row[0];
    r.text = row[1];
    r.label = parse_label(row[2]);
    if (row[3] == "augmented") {
      r.provenance = Provenance::augmented(parse_method(row[4]), row[5]);
    } else if (row[3] == "resampled") {
      r.provenance = Provenance::resampled(row[5]);
    } else if (row[3] != "original") {
      throw DataError("unknown provenance '" + row[3] + "'");
    }
    if (!row[6].empty()) r.raw_text = row[6];
    records.push_back(std::move(r));
  }
  return LabeledDataset(std::move(records));
}

LabeledDataset read_saved_dataset(const std::filesystem::path& path) {
  return parse_saved_dataset(csv::read_file(path));
}

}  // namespace emoflow
