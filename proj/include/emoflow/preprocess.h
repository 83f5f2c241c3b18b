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

#ifndef EMOFLOW_PREPROCESS_H_
#define EMOFLOW_PREPROCESS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "emoflow/corpus.h"

namespace emoflow {

enum class CleanStage { kRemoveStopwords, kFilterAlphabet, kLowercase };

std::string_view stage_name(CleanStage stage);
CleanStage parse_stage(std::string_view name);

using Stoplist = std::unordered_set<std::string>;

struct CleanConfig {
  Stoplist stopwords;
  bool remove_stopwords = true;
  bool filter_alphabet = true;
  bool lowercase = true;
  // Case-folding runs first so that lowercase stoplist entries match
  // capitalised tokens.
  std::vector<CleanStage> stage_order = {CleanStage::kLowercase,
                                         CleanStage::kFilterAlphabet,
                                         CleanStage::kRemoveStopwords};

  bool enabled(CleanStage stage) const;
  // Throws ConfigError unless every enabled stage appears exactly once.
  void validate() const;
};

// Drops whitespace-separated tokens whose lowercase form is in the stoplist
// and re-joins the rest with single spaces.
std::string remove_stopwords(std::string_view text, const Stoplist& stoplist);

// Keeps Unicode letters and spaces only, collapsing space runs and trimming.
// Other whitespace (tabs, newlines) is treated as a space so words on
// separate lines are not glued together.
std::string filter_alphabet(std::string_view text);

// Simple (one-to-one) Unicode lowercase mapping; code point count is
// preserved and the operation is idempotent.
std::string lowercase(std::string_view text);

std::string clean_pipeline(std::string_view text, const CleanConfig& config);

// Number of code points; invalid bytes count one each.
std::size_t char_count(std::string_view text);

// One token per line, '#' comments and blank lines ignored, entries
// lowercased.
Stoplist parse_stopwords(std::string_view content);
Stoplist load_stopwords(const std::filesystem::path& path);

struct CleanResult {
  LabeledDataset dataset;
  // Records whose text became empty; they cannot stay in a dataset.
  std::vector<std::string> dropped_ids;
};

// Applies clean_pipeline to every record, keeping the original text in
// ReviewRecord::raw_text.
CleanResult clean_dataset(const LabeledDataset& dataset,
                          const CleanConfig& config);

}  // namespace emoflow

#endif  // EMOFLOW_PREPROCESS_H_
