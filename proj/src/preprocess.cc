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

#include "emoflow/preprocess.h"

#include <algorithm>
#include <sstream>

#include "emoflow/csv.h"
#include "emoflow/error.h"
#include "utf8.h"

namespace emoflow {
namespace {

std::vector<std::string_view> split_ascii_whitespace(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string_view trim_line(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  return s;
}

}  // namespace

std::string_view stage_name(CleanStage stage) {
  switch (stage) {
    case CleanStage::kRemoveStopwords:
      return "remove_stopwords";
    case CleanStage::kFilterAlphabet:
      return "filter_alphabet";
    case CleanStage::kLowercase:
      return "lowercase";
  }
  return "lowercase";
}

CleanStage parse_stage(std::string_view name) {
  for (auto s : {CleanStage::kRemoveStopwords, CleanStage::kFilterAlphabet,
                 CleanStage::kLowercase}) {
    if (name == stage_name(s)) return s;
  }
  throw ConfigError("unknown cleaning stage '" + std::string(name) + "'");
}

bool CleanConfig::enabled(CleanStage stage) const {
  switch (stage) {
    case CleanStage::kRemoveStopwords:
      return remove_stopwords;
    case CleanStage::kFilterAlphabet:
      return filter_alphabet;
    case CleanStage::kLowercase:
      return lowercase;
  }
  return false;
}

void CleanConfig::validate() const {
  for (auto stage : {CleanStage::kRemoveStopwords, CleanStage::kFilterAlphabet,
                     CleanStage::kLowercase}) {
    const auto n = std::count(stage_order.begin(), stage_order.end(), stage);
    if (n > 1) {
      throw ConfigError("stage '" + std::string(stage_name(stage)) +
                        "' listed more than once in stage_order");
    }
    if (enabled(stage) && n == 0) {
      throw ConfigError("enabled stage '" + std::string(stage_name(stage)) +
                        "' missing from stage_order");
    }
  }
}

std::string remove_stopwords(std::string_view text, const Stoplist& stoplist) {
  std::string out;
  for (auto token : split_ascii_whitespace(text)) {
    if (stoplist.count(lowercase(token)) > 0) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(token);
  }
  return out;
}

std::string filter_alphabet(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = utf8::decode(text, pos);
    if (utf8::is_space(cp)) {
      pending_space = !out.empty();
    } else if (utf8::is_alpha(cp)) {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(text.substr(start, pos - start));
    }
  }
  return out;
}

std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = utf8::decode(text, pos);
    if (cp == utf8::kInvalid) {
      out.append(text.substr(start, pos - start));
    } else {
      utf8::append(out, utf8::to_lower(cp));
    }
  }
  return out;
}

std::size_t char_count(std::string_view text) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    utf8::decode(text, pos);
    ++n;
  }
  return n;
}

std::string clean_pipeline(std::string_view text, const CleanConfig& config) {
  std::string current(text);
  for (auto stage : config.stage_order) {
    if (!config.enabled(stage)) continue;
    switch (stage) {
      case CleanStage::kRemoveStopwords:
        current = remove_stopwords(current, config.stopwords);
        break;
      case CleanStage::kFilterAlphabet:
        current = filter_alphabet(current);
        break;
      case CleanStage::kLowercase:
        current = lowercase(current);
        break;
    }
  }
  return current;
}

Stoplist parse_stopwords(std::string_view content) {
  Stoplist out;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = trim_line(content.substr(start, end - start));
    if (!line.empty() && line.front() != '#') out.insert(lowercase(line));
    start = end + 1;
  }
  return out;
}

Stoplist load_stopwords(const std::filesystem::path& path) {
  return parse_stopwords(csv::read_file(path));
}

CleanResult clean_dataset(const LabeledDataset& dataset,
                          const CleanConfig& config) {
  config.validate();
  std::vector<ReviewRecord> kept;
  kept.reserve(dataset.size());
  CleanResult result;
  for (const auto& r : dataset.records()) {
    ReviewRecord cleaned = r;
    if (!cleaned.raw_text) cleaned.raw_text = r.text;
    cleaned.text = clean_pipeline(r.text, config);
    if (cleaned.text.empty()) {
      result.dropped_ids.push_back(r.id);
      continue;
    }
    kept.push_back(std::move(cleaned));
  }
  result.dataset = LabeledDataset(std::move(kept));
  return result;
}

}  // namespace emoflow
