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

#include "emoflow/augment.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "emoflow/csv.h"
#include "emoflow/error.h"
#include "emoflow/preprocess.h"

namespace emoflow {
namespace {

std::vector<std::string> split_spaces(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && ws(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !ws(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

SynonymLexicon::SynonymLexicon(
    std::unordered_map<std::string, std::vector<std::string>> entries)
    : entries_(std::move(entries)) {
  for (const auto& [word, synonyms] : entries_) {
    if (synonyms.empty()) {
      throw DataError("lexicon entry '" + word + "' has no synonyms");
    }
    if (std::find(synonyms.begin(), synonyms.end(), word) != synonyms.end()) {
      throw DataError("lexicon entry '" + word + "' lists itself as a synonym");
    }
  }
}

const std::vector<std::string>* SynonymLexicon::find(std::string_view word) const {
  auto it = entries_.find(lowercase(word));
  return it == entries_.end() ? nullptr : &it->second;
}

SynonymLexicon parse_lexicon(std::string_view content) {
  std::unordered_map<std::string, std::vector<std::string>> entries;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = trim(content.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": expected word<TAB>synonyms");
    }
    const std::string word = lowercase(trim(line.substr(0, tab)));
    auto& list = entries[word];
    std::string_view rest = line.substr(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      auto syn = trim(rest.substr(0, comma));
      if (!syn.empty() && lowercase(syn) != word &&
          std::find(list.begin(), list.end(), syn) == list.end()) {
        list.emplace_back(syn);
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (list.empty()) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": word '" +
                      word + "' has no usable synonyms");
    }
  }
  return SynonymLexicon(std::move(entries));
}

SynonymLexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(csv::read_file(path));
}

SynonymResult synonym_replace(std::string_view text,
                              const SynonymLexicon& lexicon, double rate,
                              Rng& rng) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw ConfigError("synonym replacement rate must be in (0, 1]");
  }
  auto tokens = split_spaces(text);
  std::vector<std::size_t> replaceable;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lexicon.find(tokens[i]) != nullptr) replaceable.push_back(i);
  }
  if (replaceable.empty()) return {std::string(text), true};

  const auto m = replaceable.size();
  // The epsilon keeps products like 0.29 * 100 from flooring one short.
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(rate * static_cast<double>(m) + 1e-9)));
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(replaceable[i], replaceable[i + rng.below(m - i)]);
  }
  std::sort(replaceable.begin(), replaceable.begin() + static_cast<long>(k));
  for (std::size_t i = 0; i < k; ++i) {
    auto& token = tokens[replaceable[i]];
    const auto& synonyms = *lexicon.find(token);
    token = synonyms[rng.below(synonyms.size())];
  }
  return {join(tokens), false};
}

std::string normalize_for_dedup(std::string_view text) {
  return join(split_spaces(lowercase(text)));
}

LabeledDataset undersample(const LabeledDataset& dataset, std::uint64_t seed) {
  const auto& counts = dataset.label_counts();
  for (auto label : kAllLabels) {
    if (counts[label_index(label)] == 0) {
      throw DataError("cannot undersample: label '" +
                      std::string(label_name(label)) + "' has no records");
    }
  }
  const std::size_t keep = *std::min_element(counts.begin(), counts.end());

  std::array<std::vector<std::size_t>, kNumLabels> by_label;
  const auto& records = dataset.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_label[label_index(records[i].label)].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> selected;
  selected.reserve(keep * kNumLabels);
  for (auto& indices : by_label) {
    rng.shuffle(indices);
    selected.insert(selected.end(), indices.begin(),
                    indices.begin() + static_cast<long>(keep));
  }
  std::sort(selected.begin(), selected.end());
  std::vector<ReviewRecord> out;
  out.reserve(selected.size());
  for (auto i : selected) out.push_back(records[i]);
  return LabeledDataset(std::move(out));
}

std::size_t BalancePlan::total_deficit() const {
  std::size_t total = 0;
  for (auto d : deficit) total += d;
  return total;
}

BalancePlan plan_balance(const LabeledDataset& dataset,
                         std::optional<std::size_t> target,
                         std::vector<AugmentationMethod> method_cycle) {
  const auto& counts = dataset.label_counts();
  BalancePlan plan;
  plan.target = target.value_or(*std::max_element(counts.begin(), counts.end()));
  plan.method_cycle = std::move(method_cycle);
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    plan.deficit[i] = counts[i] >= plan.target ? 0 : plan.target - counts[i];
  }
  return plan;
}

LabeledDataset execute_plan(const LabeledDataset& dataset,
                            const BalancePlan& plan,
                            const AugmenterSet& augmenters, Rng& rng) {
  if (plan.total_deficit() == 0) return dataset;
  if (plan.method_cycle.empty()) {
    throw ConfigError("balance plan has an empty method cycle");
  }
  for (auto method : plan.method_cycle) {
    if (augmenters.find(method) == augmenters.end() ||
        !augmenters.at(method)) {
      throw ConfigError("no augmenter configured for method " +
                        std::string(method_name(method)));
    }
  }

  std::vector<ReviewRecord> out = dataset.records();
  std::unordered_set<std::string> used_ids;
  for (const auto& r : out) used_ids.insert(r.id);

  const std::size_t n_methods = plan.method_cycle.size();
  for (auto label : kAllLabels) {
    std::size_t needed = plan.deficit[label_index(label)];
    if (needed == 0) continue;

    std::vector<const ReviewRecord*> sources;
    for (const auto& r : dataset.records()) {
      if (r.label == label && r.provenance.kind == Provenance::Kind::kOriginal) {
        sources.push_back(&r);
      }
    }
    if (sources.empty()) {
      for (const auto& r : dataset.records()) {
        if (r.label == label) sources.push_back(&r);
      }
    }
    if (sources.empty()) {
      throw DataError("cannot augment label '" + std::string(label_name(label)) +
                      "': no source records");
    }
    rng.shuffle(sources);

    // Normalized texts already produced per source (including the source).
    std::vector<std::unordered_set<std::string>> seen(sources.size());
    std::vector<std::size_t> uses(sources.size(), 0);
    for (std::size_t s = 0; s < sources.size(); ++s) {
      seen[s].insert(normalize_for_dedup(sources[s]->text));
    }

    std::size_t cursor = 0;
    while (needed > 0) {
      bool progressed = false;
      for (std::size_t s = 0; s < sources.size() && needed > 0; ++s) {
        const ReviewRecord& source = *sources[s];
        for (std::size_t tries = 0; tries < n_methods; ++tries) {
          const AugmentationMethod method = plan.method_cycle[cursor];
          cursor = (cursor + 1) % n_methods;
          auto candidate = augmenters.at(method)(source, rng);
          if (!candidate || candidate->empty()) continue;
          if (!seen[s].insert(normalize_for_dedup(*candidate)).second) continue;

          std::string id;
          do {
            id = source.id + "#" + std::string(method_name(method)) + "-" +
                 std::to_string(++uses[s]);
          } while (!used_ids.insert(id).second);
          out.push_back({std::move(id), std::move(*candidate), label,
                         Provenance::augmented(method, source.id), std::nullopt});
          --needed;
          progressed = true;
          break;
        }
      }
      if (!progressed) {
        std::ostringstream msg;
        msg << "augmentation stuck for label '" << label_name(label)
            << "': no source yields a new distinct output; shortfall "
            << needed << " of " << plan.deficit[label_index(label)];
        throw DataError(msg.str());
      }
    }
  }
  return LabeledDataset(std::move(out));
}

Augmenter make_back_translation_augmenter(Translator& translator,
                                          PivotLanguage pivot) {
  return [&translator, pivot](const ReviewRecord& source,
                              Rng&) -> std::optional<std::string> {
    return translator.round_trip(source.text, pivot, source.id);
  };
}

Augmenter make_synonym_augmenter(SynonymLexicon lexicon, double rate) {
  return [lexicon = std::move(lexicon), rate](
             const ReviewRecord& source, Rng& rng) -> std::optional<std::string> {
    auto result = synonym_replace(source.text, lexicon, rate, rng);
    if (result.degenerate) return std::nullopt;
    return std::move(result.text);
  };
}

Augmenter on_raw_text(Augmenter inner,
                      std::function<std::string(const std::string&)> post) {
  return [inner = std::move(inner), post = std::move(post)](
             const ReviewRecord& source, Rng& rng) -> std::optional<std::string> {
    ReviewRecord raw = source;
    if (source.raw_text) raw.text = *source.raw_text;
    auto out = inner(raw, rng);
    if (!out) return std::nullopt;
    return post(*out);
  };
}

}  // namespace emoflow
