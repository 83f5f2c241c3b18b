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

#ifndef EMOFLOW_AUGMENT_H_
#define EMOFLOW_AUGMENT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emoflow/corpus.h"
#include "emoflow/rng.h"
#include "emoflow/translate.h"

namespace emoflow {

// word -> ordered synonym list. Keys are lowercase; no list contains its key.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  explicit SynonymLexicon(
      std::unordered_map<std::string, std::vector<std::string>> entries);

  const std::vector<std::string>* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, std::vector<std::string>>& entries()
      const {
    return entries_;
  }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

// One entry per line: word<TAB>syn1,syn2,...  '#' comments ignored.
SynonymLexicon parse_lexicon(std::string_view content);
SynonymLexicon load_lexicon(const std::filesystem::path& path);

struct SynonymResult {
  std::string text;
  // No token had a lexicon entry; text is the unchanged input.
  bool degenerate = false;
};

// Picks k = max(1, floor(rate * m)) of the m replaceable tokens uniformly
// without replacement and swaps each for a uniformly drawn synonym.
SynonymResult synonym_replace(std::string_view text,
                              const SynonymLexicon& lexicon, double rate,
                              Rng& rng);

// Lowercase + whitespace collapse; what "different from the source" is
// judged on.
std::string normalize_for_dedup(std::string_view text);

// Reduces every label to the smallest label count by seeded sampling
// without replacement. Retained records keep their original order.
LabeledDataset undersample(const LabeledDataset& dataset, std::uint64_t seed);

inline const std::vector<AugmentationMethod>& default_method_cycle() {
  static const std::vector<AugmentationMethod> cycle = {
      AugmentationMethod::kBtEn, AugmentationMethod::kBtAr,
      AugmentationMethod::kSynonym};
  return cycle;
}

struct BalancePlan {
  std::size_t target = 0;
  LabelCounts deficit{};
  std::vector<AugmentationMethod> method_cycle = default_method_cycle();

  std::size_t total_deficit() const;
};

// Without a target, plans up to the largest label count.
BalancePlan plan_balance(
    const LabeledDataset& dataset, std::optional<std::size_t> target = {},
    std::vector<AugmentationMethod> method_cycle = default_method_cycle());

// Produces a candidate text for one source record, or nullopt when the
// method has nothing to offer for it.
using Augmenter =
    std::function<std::optional<std::string>(const ReviewRecord&, Rng&)>;
using AugmenterSet = std::map<AugmentationMethod, Augmenter>;

// Fills each label's deficit with augmented records. Sources are the
// label's original records in seeded-shuffled order, cycled as often as
// needed; methods advance round-robin per attempt. A candidate is accepted
// only if its normalized form differs from the source's and from every
// output already accepted for that source. A full pass over the sources
// with no acceptance is reported as a stuck label.
LabeledDataset execute_plan(const LabeledDataset& dataset,
                            const BalancePlan& plan,
                            const AugmenterSet& augmenters, Rng& rng);

Augmenter make_back_translation_augmenter(Translator& translator,
                                          PivotLanguage pivot);
Augmenter make_synonym_augmenter(SynonymLexicon lexicon, double rate);

// Wraps an augmenter so it reads ReviewRecord::raw_text (when present) and
// passes its output through post, e.g. the cleaning pipeline.
Augmenter on_raw_text(Augmenter inner,
                      std::function<std::string(const std::string&)> post);

}  // namespace emoflow

#endif  // EMOFLOW_AUGMENT_H_
