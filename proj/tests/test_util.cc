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

#include "test_util.h"

#include <atomic>
#include <unistd.h>

#include "emoflow/rng.h"

namespace emoflow::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("emoflow-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

LabeledDataset make_dataset(const std::vector<std::pair<std::string, EmotionLabel>>& rows,
                            const std::string& prefix) {
  std::vector<ReviewRecord> records;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ReviewRecord r;
    r.id = prefix + std::to_string(i);
    r.text = rows[i].first;
    r.label = rows[i].second;
    records.push_back(std::move(r));
  }
  return LabeledDataset(std::move(records));
}

LabeledDataset synthetic_corpus(const LabelCounts& per_label, std::uint64_t seed,
                                bool disjoint_vocabulary) {
  static const char* kFiller[] = {"barang", "produk", "paket", "penjual", "toko"};
  Rng rng(seed);
  std::vector<ReviewRecord> records;
  for (auto label : kAllLabels) {
    const auto li = label_index(label);
    for (std::size_t n = 0; n < per_label[li]; ++n) {
      std::string text;
      const std::size_t words = 3 + rng.below(4);
      for (std::size_t w = 0; w < words; ++w) {
        if (!text.empty()) text += ' ';
        const auto pick = rng.below(8);
        const std::size_t owner = disjoint_vocabulary ? li : rng.below(kNumLabels);
        // Shared filler only in the overlapping mode; disjoint corpora share
        // no token across labels.
        if (pick < 2 && !disjoint_vocabulary) {
          text += kFiller[rng.below(5)];
        } else {
          text += "w" + std::to_string(owner) + "x" + std::to_string(rng.below(12));
        }
      }
      ReviewRecord r;
      r.id = std::string(label_name(label)) + "-" + std::to_string(n);
      r.text = text;
      r.label = label;
      records.push_back(std::move(r));
    }
  }
  return LabeledDataset(std::move(records));
}

}  // namespace emoflow::testing
