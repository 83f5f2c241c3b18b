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

#include "emoflow/splitprep.h"

#include <algorithm>
#include <cmath>

#include "emoflow/csv.h"
#include "emoflow/error.h"
#include "emoflow/hash.h"
#include "emoflow/preprocess.h"
#include "emoflow/rng.h"
#include "json.hpp"
#include "utf8.h"

namespace emoflow {

void SplitRatios::validate() const {
  for (double r : {train, validation, test}) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw ConfigError("split ratios must each lie in [0, 1]");
    }
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

std::array<std::size_t, 3> largest_remainder_counts(std::size_t total,
                                                    const SplitRatios& ratios) {
  const std::array<double, 3> r = {ratios.train, ratios.validation, ratios.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = r[i] * static_cast<double>(total);
    // Absorb representation error such as 0.7 * 10 = 6.999...
    const double floored = std::floor(exact + 1e-9);
    counts[i] = static_cast<std::size_t>(floored);
    remainder[i] = std::max(0.0, exact - floored);
    assigned += counts[i];
  }
  // Guard against ratios summing slightly above one.
  while (assigned > total) {
    std::size_t i = 0;
    for (std::size_t j = 1; j < 3; ++j) {
      if (counts[j] > 0 && (counts[i] == 0 || remainder[j] < remainder[i])) i = j;
    }
    --counts[i];
    --assigned;
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % 3) {
    if (r[order[k]] == 0.0) continue;
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

DatasetSplits stratified_split(const LabeledDataset& dataset,
                               const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  const bool all_nonzero =
      ratios.train > 0 && ratios.validation > 0 && ratios.test > 0;

  const auto& records = dataset.records();
  std::array<std::vector<std::size_t>, kNumLabels> by_label;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_label[label_index(records[i].label)].push_back(i);
  }

  Rng rng(seed);
  std::array<std::vector<std::size_t>, 3> parts;
  for (auto label : kAllLabels) {
    auto& indices = by_label[label_index(label)];
    if (indices.empty()) continue;
    if (all_nonzero && indices.size() < 3) {
      throw DataError("label '" + std::string(label_name(label)) + "' has " +
                      std::to_string(indices.size()) +
                      " record(s); stratified three-way split needs >= 3");
    }
    rng.shuffle(indices);
    const auto counts = largest_remainder_counts(indices.size(), ratios);
    std::size_t offset = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      parts[s].insert(parts[s].end(), indices.begin() + static_cast<long>(offset),
                      indices.begin() + static_cast<long>(offset + counts[s]));
      offset += counts[s];
    }
  }

  auto materialize = [&](std::vector<std::size_t>& idx) {
    std::sort(idx.begin(), idx.end());
    std::vector<ReviewRecord> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(records[i]);
    return LabeledDataset(std::move(out));
  };
  return {materialize(parts[0]), materialize(parts[1]), materialize(parts[2])};
}

// ---------------------------------------------------------------------------

std::vector<std::int32_t> WhitespaceHashTokenizer::encode(
    std::string_view text, std::size_t max_length) const {
  std::vector<std::int32_t> ids;
  std::size_t i = 0;
  while (i < text.size() && ids.size() < max_length) {
    while (i < text.size() && text[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    if (i > start) {
      const auto h = Fnv1a().update(text.substr(start, i - start)).digest();
      ids.push_back(static_cast<std::int32_t>(1 + h % vocab_size_));
    }
  }
  return ids;
}

std::string WhitespaceHashTokenizer::vocabulary_id() const {
  return "whitespace-hash-" + std::to_string(vocab_size_);
}

// ---------------------------------------------------------------------------

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocab,
                                       bool do_lower_case)
    : do_lower_case_(do_lower_case) {
  Fnv1a h;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    vocab_.emplace(vocab[i], static_cast<std::int32_t>(i));
    h.field(vocab[i]);
  }
  auto required = [&](const char* token) {
    auto it = vocab_.find(token);
    if (it == vocab_.end()) {
      throw DataError(std::string("vocabulary lacks special token ") + token);
    }
    return it->second;
  };
  pad_id_ = required("[PAD]");
  unk_id_ = required("[UNK]");
  cls_id_ = required("[CLS]");
  sep_id_ = required("[SEP]");
  vocabulary_id_ = "wordpiece-" + h.hex();
}

WordPieceTokenizer WordPieceTokenizer::from_directory(
    const std::filesystem::path& dir) {
  const auto vocab_path = dir / "vocab.txt";
  if (!std::filesystem::exists(vocab_path)) {
    throw IoError("tokenizer directory lacks vocab.txt: " + dir.string());
  }
  std::vector<std::string> vocab;
  const std::string content = csv::read_file(vocab_path);
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(std::move(line));
    start = end + 1;
  }
  bool lower = true;
  const auto config_path = dir / "tokenizer_config.json";
  if (std::filesystem::exists(config_path)) {
    auto cfg = nlohmann::json::parse(csv::read_file(config_path), nullptr, false);
    if (cfg.is_object() && cfg.contains("do_lower_case") &&
        cfg["do_lower_case"].is_boolean()) {
      lower = cfg["do_lower_case"].get<bool>();
    }
  }
  return WordPieceTokenizer(std::move(vocab), lower);
}

std::int32_t WordPieceTokenizer::id_of(const std::string& piece) const {
  auto it = vocab_.find(piece);
  return it == vocab_.end() ? unk_id_ : it->second;
}

namespace {

bool is_punctuation(char32_t cp) {
  if ((cp >= 33 && cp <= 47) || (cp >= 58 && cp <= 64) ||
      (cp >= 91 && cp <= 96) || (cp >= 123 && cp <= 126)) {
    return true;
  }
  return cp >= 0x2000 && cp <= 0x206F;  // General Punctuation block
}

}  // namespace

std::vector<std::string> WordPieceTokenizer::tokenize(std::string_view text) const {
  // Basic tokenization: whitespace split, punctuation isolated.
  const std::string prepared = do_lower_case_ ? lowercase(text) : std::string(text);
  std::vector<std::string> words;
  std::string current;
  std::size_t pos = 0;
  while (pos < prepared.size()) {
    const std::size_t start = pos;
    const char32_t cp = utf8::decode(prepared, pos);
    if (utf8::is_space(cp) || cp == 0 || cp == utf8::kInvalid) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else if (is_punctuation(cp)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
      words.emplace_back(prepared.substr(start, pos - start));
    } else {
      current.append(prepared, start, pos - start);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));

  // Greedy longest-match-first WordPiece.
  static constexpr std::size_t kMaxWordChars = 100;
  std::vector<std::string> pieces;
  for (const auto& word : words) {
    if (char_count(word) > kMaxWordChars) {
      pieces.emplace_back("[UNK]");
      continue;
    }
    std::vector<std::size_t> boundaries;  // byte offsets of code points
    for (std::size_t p = 0; p < word.size();) {
      boundaries.push_back(p);
      utf8::decode(word, p);
    }
    boundaries.push_back(word.size());

    std::vector<std::string> word_pieces;
    std::size_t begin = 0;
    bool bad = false;
    while (begin + 1 < boundaries.size()) {
      std::size_t end = boundaries.size() - 1;
      std::string match;
      while (end > begin) {
        std::string sub = word.substr(boundaries[begin],
                                      boundaries[end] - boundaries[begin]);
        if (begin > 0) sub = "##" + sub;
        if (vocab_.count(sub) > 0) {
          match = std::move(sub);
          break;
        }
        --end;
      }
      if (match.empty()) {
        bad = true;
        break;
      }
      word_pieces.push_back(std::move(match));
      begin = end;
    }
    if (bad) {
      pieces.emplace_back("[UNK]");
    } else {
      pieces.insert(pieces.end(), word_pieces.begin(), word_pieces.end());
    }
  }
  return pieces;
}

std::vector<std::int32_t> WordPieceTokenizer::encode(std::string_view text,
                                                     std::size_t max_length) const {
  if (max_length < min_sequence_length()) {
    throw ConfigError("max_length must be >= 2 for [CLS]/[SEP]");
  }
  std::vector<std::int32_t> ids = {cls_id_};
  for (const auto& piece : tokenize(text)) {
    if (ids.size() + 1 >= max_length) break;
    ids.push_back(id_of(piece));
  }
  ids.push_back(sep_id_);
  return ids;
}

// ---------------------------------------------------------------------------

EncodedBatch tokenize_batch(const std::vector<std::string>& texts,
                            const Tokenizer& tokenizer, std::size_t max_length) {
  if (max_length < tokenizer.min_sequence_length()) {
    throw ConfigError("max_length " + std::to_string(max_length) +
                      " is below the tokenizer's minimum sequence length");
  }
  EncodedBatch batch;
  batch.max_length = max_length;
  batch.token_ids.reserve(texts.size());
  std::size_t longest = 0;
  for (const auto& text : texts) {
    auto ids = tokenizer.encode(text, max_length);
    if (ids.size() > max_length) ids.resize(max_length);
    longest = std::max(longest, ids.size());
    batch.token_ids.push_back(std::move(ids));
  }
  batch.attention_mask.reserve(texts.size());
  for (auto& ids : batch.token_ids) {
    std::vector<std::uint8_t> mask(longest, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(ids.size()), 1);
    ids.resize(longest, tokenizer.pad_id());
    batch.attention_mask.push_back(std::move(mask));
  }
  return batch;
}

EncodedBatch tokenize_dataset(const LabeledDataset& dataset,
                              const Tokenizer& tokenizer, std::size_t max_length) {
  EncodedBatch batch = tokenize_batch(dataset.texts(), tokenizer, max_length);
  std::vector<std::size_t> labels;
  labels.reserve(dataset.size());
  for (const auto& r : dataset.records()) labels.push_back(label_index(r.label));
  batch.labels = std::move(labels);
  return batch;
}

std::string batch_fingerprint(const EncodedBatch& batch) {
  Fnv1a h;
  h.field(std::to_string(batch.max_length));
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    std::string row;
    for (std::size_t c = 0; c < batch.token_ids[r].size(); ++c) {
      row += std::to_string(batch.token_ids[r][c]);
      row.push_back(batch.attention_mask[r][c] ? '+' : '-');
    }
    if (batch.labels) row += "|" + std::to_string((*batch.labels)[r]);
    h.field(row);
  }
  return h.hex();
}

}  // namespace emoflow
