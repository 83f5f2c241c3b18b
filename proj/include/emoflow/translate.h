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

#ifndef EMOFLOW_TRANSLATE_H_
#define EMOFLOW_TRANSLATE_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "emoflow/error.h"

namespace emoflow {

inline constexpr std::string_view kSourceLanguage = "id";

enum class PivotLanguage { kEnglish, kArabic };

std::string_view language_code(PivotLanguage pivot);
PivotLanguage parse_pivot(std::string_view code);

// Raised by a backend when the provider could not be reached; the
// Translator retries these. Any other exception from a backend is final.
class BackendUnavailable : public Error {
 public:
  explicit BackendUnavailable(const std::string& message)
      : Error(ErrorKind::kTranslation, message) {}
};

class TranslationError : public Error {
 public:
  TranslationError(const std::string& message, std::string text_id,
                   int attempts, std::string leg = {})
      : Error(ErrorKind::kTranslation, message),
        text_id_(std::move(text_id)),
        attempts_(attempts),
        leg_(std::move(leg)) {}

  const std::string& text_id() const { return text_id_; }
  int attempts() const { return attempts_; }
  // "id->en" style leg of a round trip, empty for direct calls.
  const std::string& leg() const { return leg_; }

 private:
  std::string text_id_;
  int attempts_;
  std::string leg_;
};

class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;
  // Distinguishes providers so their cached outputs never mix.
  virtual std::string backend_id() const = 0;
  virtual std::string translate(const std::string& text, std::string_view src,
                                std::string_view dst) = 0;
};

// Returns its input; round trips through it are degenerate augmentations.
class EchoBackend : public TranslationBackend {
 public:
  std::string backend_id() const override { return "echo"; }
  std::string translate(const std::string& text, std::string_view,
                        std::string_view) override {
    return text;
  }
};

// Offline stub driven by per-direction lookup tables. A text found verbatim
// in the table maps to its entry; otherwise each whitespace token is looked
// up and unknown tokens pass through unchanged.
class DictionaryBackend : public TranslationBackend {
 public:
  using Table = std::unordered_map<std::string, std::string>;

  void add_table(std::string_view src, std::string_view dst, Table table);
  // Two-column UTF-8 file, tab separated: source<TAB>target. '#' comments.
  void load_table(const std::filesystem::path& path, std::string_view src,
                  std::string_view dst);

  std::string backend_id() const override;
  std::string translate(const std::string& text, std::string_view src,
                        std::string_view dst) override;

 private:
  std::map<std::pair<std::string, std::string>, Table> tables_;
};

DictionaryBackend::Table parse_dictionary(std::string_view content);

struct HttpBackendConfig {
  // LibreTranslate-compatible endpoint, e.g. http://localhost:5000/translate
  std::string endpoint;
  // Name of the environment variable holding the API key; empty for none.
  std::string credential_env;
  double timeout_seconds = 10.0;
  // Stable identity for the cache; defaults to the endpoint.
  std::string backend_id;

  bool operator==(const HttpBackendConfig&) const = default;
};

// POSTs {"q","source","target","format"[,"api_key"]} as JSON and reads
// "translatedText" from the response. Network failures and 5xx/429
// responses raise BackendUnavailable.
class HttpBackend : public TranslationBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string backend_id() const override;
  std::string translate(const std::string& text, std::string_view src,
                        std::string_view dst) override;

 private:
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

struct CacheKey {
  std::string backend_id;
  std::string src;
  std::string dst;
  std::string text_hash;

  bool operator==(const CacheKey&) const = default;
};

CacheKey make_cache_key(std::string_view backend_id, std::string_view src,
                        std::string_view dst, std::string_view text);

// Persistent key-value store, one tab-separated line per entry, appended as
// entries arrive. The last entry for a key wins on reload. Thread-safe.
class TranslationCache {
 public:
  // In-memory only.
  TranslationCache() = default;
  explicit TranslationCache(std::filesystem::path path);

  std::optional<std::string> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const std::string& value);
  std::size_t size() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  static std::string flat_key(const CacheKey& key);

  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
  std::ofstream append_;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_delay{250};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{8000};

  // Delay before attempt i+1 (i = 0 .. max_attempts-2); non-decreasing.
  std::vector<std::chrono::milliseconds> delays() const;
  void validate() const;

  bool operator==(const RetryPolicy&) const = default;
};

class Translator {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  Translator(TranslationBackend& backend, TranslationCache& cache,
             RetryPolicy retry = {}, Sleeper sleeper = {});

  std::string translate(const std::string& text, std::string_view src,
                        std::string_view dst, std::string_view text_id = {});

  // id -> pivot -> id, each leg cached on its own.
  std::string round_trip(const std::string& text, PivotLanguage pivot,
                         std::string_view text_id = {});

  // Issues up to width requests at a time; results keep input order.
  std::vector<std::string> translate_many(const std::vector<std::string>& texts,
                                          std::string_view src,
                                          std::string_view dst,
                                          std::size_t width = 4);
  std::vector<std::string> round_trip_many(
      const std::vector<std::string>& texts, PivotLanguage pivot,
      std::size_t width = 4);

  const std::string& backend_id() const { return backend_id_; }
  std::size_t backend_calls() const { return backend_calls_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

 private:
  TranslationBackend& backend_;
  TranslationCache& cache_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  std::string backend_id_;
  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

}  // namespace emoflow

#endif  // EMOFLOW_TRANSLATE_H_
