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

#include "emoflow/translate.h"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>

#include "emoflow/csv.h"
#include "emoflow/hash.h"
#include "httplib.h"
#include "json.hpp"

namespace emoflow {
namespace {

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

std::string escape_value(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string unescape_value(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    const char next = s[++i];
    out.push_back(next == 't' ? '\t' : next == 'n' ? '\n' : next == 'r' ? '\r' : next);
  }
  return out;
}

std::string leg_name(std::string_view src, std::string_view dst) {
  return std::string(src) + "->" + std::string(dst);
}

}  // namespace

std::string_view language_code(PivotLanguage pivot) {
  return pivot == PivotLanguage::kEnglish ? "en" : "ar";
}

PivotLanguage parse_pivot(std::string_view code) {
  if (code == "en") return PivotLanguage::kEnglish;
  if (code == "ar") return PivotLanguage::kArabic;
  throw ConfigError("pivot language must be 'en' or 'ar', got '" +
                    std::string(code) + "'");
}

// ---------------------------------------------------------------------------
// DictionaryBackend

DictionaryBackend::Table parse_dictionary(std::string_view content) {
  DictionaryBackend::Table table;
  std::size_t line_no = 0;
  for (auto line : split_lines(content)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("dictionary line " + std::to_string(line_no) +
                      " is not two tab-separated columns");
    }
    table[std::string(line.substr(0, tab))] = std::string(line.substr(tab + 1));
  }
  return table;
}

void DictionaryBackend::add_table(std::string_view src, std::string_view dst,
                                  Table table) {
  tables_[{std::string(src), std::string(dst)}] = std::move(table);
}

void DictionaryBackend::load_table(const std::filesystem::path& path,
                                   std::string_view src, std::string_view dst) {
  add_table(src, dst, parse_dictionary(csv::read_file(path)));
}

std::string DictionaryBackend::backend_id() const {
  Fnv1a h;
  for (const auto& [dir, table] : tables_) {
    h.field(dir.first).field(dir.second);
    std::vector<std::pair<std::string, std::string>> sorted(table.begin(),
                                                            table.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [k, v] : sorted) h.field(k).field(v);
  }
  return "dict-" + h.hex();
}

std::string DictionaryBackend::translate(const std::string& text,
                                         std::string_view src,
                                         std::string_view dst) {
  auto it = tables_.find({std::string(src), std::string(dst)});
  if (it == tables_.end()) return text;
  const Table& table = it->second;
  if (auto hit = table.find(text); hit != table.end()) return hit->second;

  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    if (i > start) {
      const std::string token = text.substr(start, i - start);
      auto t = table.find(token);
      if (!out.empty()) out.push_back(' ');
      out += t == table.end() ? token : t->second;
    }
    while (i < text.size() && text[i] == ' ') ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const auto& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("translation endpoint must be an http(s) URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/translate" : url.substr(path_start);
  if (config_.timeout_seconds <= 0) {
    throw ConfigError("translation timeout must be positive");
  }
}

std::string HttpBackend::backend_id() const {
  return config_.backend_id.empty() ? "http:" + config_.endpoint
                                    : config_.backend_id;
}

std::string HttpBackend::translate(const std::string& text,
                                   std::string_view src, std::string_view dst) {
  nlohmann::json body = {{"q", text},
                         {"source", std::string(src)},
                         {"target", std::string(dst)},
                         {"format", "text"}};
  if (!config_.credential_env.empty()) {
    if (const char* key = std::getenv(config_.credential_env.c_str())) {
      body["api_key"] = key;
    }
  }

  httplib::Client client(scheme_host_port_);
  const auto seconds = static_cast<time_t>(config_.timeout_seconds);
  const auto micros = static_cast<time_t>(
      (config_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw BackendUnavailable("request to " + config_.endpoint + " failed: " +
                             httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw BackendUnavailable("translation service returned HTTP " +
                             std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kTranslation,
                "translation service returned HTTP " +
                    std::to_string(res->status) + ": " + res->body);
  }
  auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("translatedText") ||
      !parsed["translatedText"].is_string()) {
    throw Error(ErrorKind::kTranslation,
                "malformed translation response: " + res->body);
  }
  return parsed["translatedText"].get<std::string>();
}

// ---------------------------------------------------------------------------
// TranslationCache

CacheKey make_cache_key(std::string_view backend_id, std::string_view src,
                        std::string_view dst, std::string_view text) {
  return {std::string(backend_id), std::string(src), std::string(dst),
          Fnv1a().field(text).hex()};
}

std::string TranslationCache::flat_key(const CacheKey& key) {
  return key.backend_id + '\t' + key.src + '\t' + key.dst + '\t' + key.text_hash;
}

TranslationCache::TranslationCache(std::filesystem::path path)
    : path_(std::move(path)) {
  if (std::filesystem::exists(*path_)) {
    const std::string content = csv::read_file(*path_);
    for (auto line : split_lines(content)) {
      if (line.empty()) continue;
      auto parts = split_on(line, '\t');
      // A torn final line from an interrupted run is skipped.
      if (parts.size() != 5) continue;
      entries_[std::string(parts[0]) + '\t' + std::string(parts[1]) + '\t' +
               std::string(parts[2]) + '\t' + std::string(parts[3])] =
          unescape_value(parts[4]);
    }
    // Make sure appended entries start on a fresh line.
    if (!content.empty() && content.back() != '\n') {
      std::ofstream fix(*path_, std::ios::app | std::ios::binary);
      fix << '\n';
    }
  } else if (path_->has_parent_path()) {
    std::filesystem::create_directories(path_->parent_path());
  }
  append_.open(*path_, std::ios::app | std::ios::binary);
  if (!append_) throw IoError("cannot open translation cache " + path_->string());
}

std::optional<std::string> TranslationCache::lookup(const CacheKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(flat_key(key));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void TranslationCache::store(const CacheKey& key, const std::string& value) {
  std::lock_guard lock(mutex_);
  const std::string flat = flat_key(key);
  entries_[flat] = value;
  if (append_.is_open()) {
    append_ << flat << '\t' << escape_value(value) << '\n';
    append_.flush();
  }
}

std::size_t TranslationCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// RetryPolicy / Translator

std::vector<std::chrono::milliseconds> RetryPolicy::delays() const {
  std::vector<std::chrono::milliseconds> out;
  double delay = static_cast<double>(initial_delay.count());
  for (int i = 0; i + 1 < max_attempts; ++i) {
    const double capped =
        std::min(delay, static_cast<double>(max_delay.count()));
    out.emplace_back(static_cast<long long>(capped));
    delay *= multiplier;
  }
  return out;
}

void RetryPolicy::validate() const {
  if (max_attempts < 1) throw ConfigError("retry max_attempts must be >= 1");
  if (multiplier < 1.0) throw ConfigError("retry multiplier must be >= 1");
  if (initial_delay.count() < 0 || max_delay < initial_delay) {
    throw ConfigError("retry delays must satisfy 0 <= initial <= max");
  }
}

Translator::Translator(TranslationBackend& backend, TranslationCache& cache,
                       RetryPolicy retry, Sleeper sleeper)
    : backend_(backend),
      cache_(cache),
      retry_(retry),
      sleeper_(std::move(sleeper)),
      backend_id_(backend.backend_id()) {
  retry_.validate();
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::string Translator::translate(const std::string& text, std::string_view src,
                                  std::string_view dst,
                                  std::string_view text_id) {
  if (src == dst) {
    throw ConfigError("source and target language are both '" +
                      std::string(src) + "'");
  }
  if (text.empty()) {
    throw TranslationError("cannot translate empty text", std::string(text_id), 0,
                           leg_name(src, dst));
  }
  const CacheKey key = make_cache_key(backend_id_, src, dst, text);
  if (auto hit = cache_.lookup(key)) {
    ++cache_hits_;
    return *hit;
  }

  const auto delays = retry_.delays();
  std::string last_error;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    try {
      ++backend_calls_;
      std::string out = backend_.translate(text, src, dst);
      if (out.empty()) {
        throw TranslationError("backend returned an empty translation",
                               std::string(text_id), attempt, leg_name(src, dst));
      }
      cache_.store(key, out);
      return out;
    } catch (const BackendUnavailable& e) {
      last_error = e.what();
      if (attempt < retry_.max_attempts) {
        sleeper_(delays[static_cast<std::size_t>(attempt - 1)]);
      }
    }
  }
  throw TranslationError("translation of text '" + std::string(text_id) +
                             "' failed after " +
                             std::to_string(retry_.max_attempts) +
                             " attempts: " + last_error,
                         std::string(text_id), retry_.max_attempts,
                         leg_name(src, dst));
}

std::string Translator::round_trip(const std::string& text, PivotLanguage pivot,
                                   std::string_view text_id) {
  const auto pivot_code = language_code(pivot);
  std::string_view current_leg;
  const std::string out_leg = leg_name(kSourceLanguage, pivot_code);
  const std::string back_leg = leg_name(pivot_code, kSourceLanguage);
  try {
    current_leg = out_leg;
    const std::string there = translate(text, kSourceLanguage, pivot_code, text_id);
    current_leg = back_leg;
    return translate(there, pivot_code, kSourceLanguage, text_id);
  } catch (const TranslationError& e) {
    throw TranslationError(std::string(e.what()) + " [leg " +
                               std::string(current_leg) + "]",
                           e.text_id(), e.attempts(), std::string(current_leg));
  }
}

namespace {

template <typename Fn>
std::vector<std::string> run_bounded(std::size_t n, std::size_t width, Fn fn) {
  std::vector<std::string> results(n);
  if (n == 0) return results;
  width = std::clamp<std::size_t>(width, 1, n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(width);
  for (std::size_t t = 0; t < width; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace

std::vector<std::string> Translator::translate_many(
    const std::vector<std::string>& texts, std::string_view src,
    std::string_view dst, std::size_t width) {
  return run_bounded(texts.size(), width, [&](std::size_t i) {
    return translate(texts[i], src, dst, std::to_string(i));
  });
}

std::vector<std::string> Translator::round_trip_many(
    const std::vector<std::string>& texts, PivotLanguage pivot,
    std::size_t width) {
  return run_bounded(texts.size(), width, [&](std::size_t i) {
    return round_trip(texts[i], pivot, std::to_string(i));
  });
}

}  // namespace emoflow
