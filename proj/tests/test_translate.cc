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

#include <atomic>
#include <thread>

#include "doctest.h"
#include "emoflow/csv.h"
#include "emoflow/serialize.h"
#include "emoflow/translate.h"
#include "httplib.h"
#include "test_util.h"

using namespace emoflow;
using emoflow::testing::data_dir;
using emoflow::testing::TempDir;

namespace {

// Fails `failures` times with BackendUnavailable, then echoes.
class FlakyBackend : public TranslationBackend {
 public:
  explicit FlakyBackend(int failures) : failures_(failures) {}
  std::string backend_id() const override { return "flaky"; }
  std::string translate(const std::string& text, std::string_view,
                        std::string_view) override {
    ++calls;
    if (failures_-- > 0) throw BackendUnavailable("offline");
    return text + "'";
  }
  std::atomic<int> calls{0};

 private:
  std::atomic<int> failures_;
};

DictionaryBackend stub_dictionary() {
  DictionaryBackend d;
  d.add_table("id", "en", {{"senang", "happy"}, {"barang", "goods"}});
  d.add_table("en", "id", {{"happy", "gembira"}, {"goods", "produk"}});
  d.add_table("id", "ar", {{"senang", "farah"}});
  d.add_table("ar", "id", {{"farah", "bahagia"}});
  return d;
}

Translator::Sleeper recording(std::vector<std::chrono::milliseconds>& out) {
  return [&out](std::chrono::milliseconds d) { out.push_back(d); };
}

}  // namespace

TEST_SUITE("translate") {
  TEST_CASE("dictionary stub lookup and cache hit") {
    auto dict = stub_dictionary();
    TranslationCache cache;
    Translator t(dict, cache);
    CHECK(t.translate("senang", "id", "en") == "happy");
    CHECK(t.backend_calls() == 1);
    CHECK(t.translate("senang", "id", "en") == "happy");
    CHECK(t.backend_calls() == 1);
    CHECK(t.cache_hits() == 1);
    CHECK(t.translate("barang senang", "id", "en") == "goods happy");
  }

  TEST_CASE("round trip through asymmetric stubs") {
    auto dict = stub_dictionary();
    TranslationCache cache;
    Translator t(dict, cache);
    CHECK(t.round_trip("senang", PivotLanguage::kEnglish) == "gembira");
    const auto ar = t.round_trip("senang", PivotLanguage::kArabic);
    CHECK(ar == "bahagia");
    CHECK(ar != t.round_trip("senang", PivotLanguage::kEnglish));
    // Both legs of each pivot were cached independently.
    CHECK(cache.size() == 4);
  }

  TEST_CASE("echo backend round-trips to the original text") {
    EchoBackend echo;
    TranslationCache cache;
    Translator t(echo, cache);
    CHECK(t.round_trip("barang bagus", PivotLanguage::kEnglish) == "barang bagus");
  }

  TEST_CASE("always-failing backend exhausts the attempt limit") {
    FlakyBackend flaky(1000);
    TranslationCache cache;
    RetryPolicy retry;
    retry.max_attempts = 3;
    std::vector<std::chrono::milliseconds> slept;
    Translator t(flaky, cache, retry, recording(slept));
    try {
      t.translate("x", "id", "en", "rec-7");
      FAIL("expected TranslationError");
    } catch (const TranslationError& e) {
      CHECK(e.attempts() == 3);
      CHECK(e.text_id() == "rec-7");
      CHECK(e.leg() == "id->en");
    }
    CHECK(flaky.calls == 3);
    CHECK(slept.size() == 2);
  }

  TEST_CASE("transient failures are retried then cached") {
    FlakyBackend flaky(2);
    TranslationCache cache;
    std::vector<std::chrono::milliseconds> slept;
    Translator t(flaky, cache, RetryPolicy{}, recording(slept));
    CHECK(t.translate("x", "id", "en") == "x'");
    CHECK(flaky.calls == 3);
    CHECK(slept == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(250),
                                                          std::chrono::milliseconds(500)});
  }

  TEST_CASE("round trip failure names the failing leg") {
    DictionaryBackend dict;
    class BackLegFails : public TranslationBackend {
     public:
      std::string backend_id() const override { return "half"; }
      std::string translate(const std::string& text, std::string_view src,
                            std::string_view) override {
        if (src != "id") throw BackendUnavailable("down");
        return text + "-en";
      }
    } half;
    TranslationCache cache;
    Translator t(half, cache, RetryPolicy{2, std::chrono::milliseconds(0), 1.0,
                                         std::chrono::milliseconds(0)},
                 [](std::chrono::milliseconds) {});
    try {
      t.round_trip("x", PivotLanguage::kEnglish, "r1");
      FAIL("expected TranslationError");
    } catch (const TranslationError& e) {
      CHECK(e.leg() == "en->id");
    }
  }

  TEST_CASE("same-language and empty requests are rejected") {
    EchoBackend echo;
    TranslationCache cache;
    Translator t(echo, cache);
    CHECK_THROWS_AS(t.translate("x", "id", "id"), ConfigError);
    CHECK_THROWS_AS(t.translate("", "id", "en"), TranslationError);
  }

  TEST_CASE("property: backoff delays are non-decreasing and bounded") {
    for (int attempts = 1; attempts <= 12; ++attempts) {
      for (double mult : {1.0, 1.5, 2.0, 3.0}) {
        RetryPolicy p{attempts, std::chrono::milliseconds(100), mult,
                      std::chrono::milliseconds(2000)};
        const auto d = p.delays();
        CHECK(d.size() == static_cast<std::size_t>(attempts - 1));
        for (std::size_t i = 0; i < d.size(); ++i) {
          CHECK(d[i] <= p.max_delay);
          if (i > 0) CHECK(d[i] >= d[i - 1]);
        }
      }
    }
    CHECK_THROWS_AS((RetryPolicy{0, {}, 2.0, {}}.validate()), ConfigError);
  }

  TEST_CASE("property: replaying a call sequence makes no backend calls") {
    auto dict = stub_dictionary();
    TempDir tmp("cache");
    const auto path = tmp.path() / "translations.tsv";
    const std::vector<std::string> texts = {"senang", "barang", "senang barang",
                                            "kata\ttab", "baris\nbaru"};
    std::vector<std::string> first;
    {
      TranslationCache cache(path);
      Translator t(dict, cache);
      for (const auto& s : texts) first.push_back(t.round_trip(s, PivotLanguage::kEnglish));
      CHECK(t.backend_calls() > 0);
    }
    TranslationCache reloaded(path);
    Translator t(dict, reloaded);
    std::vector<std::string> second;
    for (const auto& s : texts) second.push_back(t.round_trip(s, PivotLanguage::kEnglish));
    CHECK(t.backend_calls() == 0);
    CHECK(second == first);
  }

  TEST_CASE("cache keys separate backends and directions") {
    TranslationCache cache;
    cache.store(make_cache_key("a", "id", "en", "x"), "one");
    cache.store(make_cache_key("b", "id", "en", "x"), "two");
    cache.store(make_cache_key("a", "en", "id", "x"), "three");
    CHECK(cache.lookup(make_cache_key("a", "id", "en", "x")) == std::optional<std::string>("one"));
    CHECK(cache.lookup(make_cache_key("b", "id", "en", "x")) == std::optional<std::string>("two"));
    CHECK(cache.lookup(make_cache_key("a", "en", "id", "x")) == std::optional<std::string>("three"));
    CHECK_FALSE(cache.lookup(make_cache_key("a", "id", "ar", "x")).has_value());
  }

  TEST_CASE("cache file tolerates a torn trailing line") {
    TempDir tmp("torn");
    const auto path = tmp.path() / "t.tsv";
    {
      TranslationCache cache(path);
      cache.store(make_cache_key("a", "id", "en", "x"), "ok");
    }
    const auto body = csv::read_file(path);
    csv::write_file(path, body + "a\tid\ten");
    TranslationCache cache(path);
    CHECK(cache.size() == 1);
    CHECK(cache.lookup(make_cache_key("a", "id", "en", "x")) == std::optional<std::string>("ok"));
  }

  TEST_CASE("parallel round trips match sequential ones") {
    DictionaryBackend dict;
    dict.load_table(data_dir() / "id-en.tsv", "id", "en");
    dict.load_table(data_dir() / "en-id.tsv", "en", "id");
    const std::vector<std::string> texts = {"senang barang", "marah rusak", "sedih",
                                            "takut bahaya", "cinta lucu", "puas cepat"};
    TranslationCache c1, c2;
    Translator seq(dict, c1), par(dict, c2);
    std::vector<std::string> expect;
    for (const auto& s : texts) expect.push_back(seq.round_trip(s, PivotLanguage::kEnglish));
    CHECK(par.round_trip_many(texts, PivotLanguage::kEnglish, 4) == expect);
  }

  TEST_CASE("dictionary backend id depends on table content") {
    DictionaryBackend a, b;
    a.add_table("id", "en", {{"x", "y"}});
    b.add_table("id", "en", {{"x", "z"}});
    CHECK(a.backend_id() != b.backend_id());
    CHECK(a.backend_id().rfind("dict-", 0) == 0);
    CHECK_THROWS_AS(parse_dictionary("no tab here\n"), DataError);
  }

  TEST_CASE("http backend against a local server") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/translate", [&](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      const auto body = Json::parse(req.body);
      if (body["q"] == "busy") {
        res.status = 503;
        return;
      }
      if (body["q"] == "bad") {
        res.status = 400;
        res.set_content("nope", "text/plain");
        return;
      }
      const std::string out = body["q"].get<std::string>() + "@" +
                              body["source"].get<std::string>() + ">" +
                              body["target"].get<std::string>() +
                              (body.contains("api_key") ? "+key" : "");
      res.set_content(Json{{"translatedText", out}}.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("EMOFLOW_TEST_KEY", "secret", 1);
    HttpBackendConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/translate";
    cfg.credential_env = "EMOFLOW_TEST_KEY";
    cfg.timeout_seconds = 5;
    HttpBackend http(cfg);
    CHECK(http.translate("halo", "id", "en") == "halo@id>en+key");
    CHECK_THROWS_AS(http.translate("busy", "id", "en"), BackendUnavailable);
    CHECK_THROWS_AS(http.translate("bad", "id", "en"), Error);

    TranslationCache cache;
    Translator t(http, cache, RetryPolicy{2, std::chrono::milliseconds(0), 1.0,
                                         std::chrono::milliseconds(0)},
                 [](std::chrono::milliseconds) {});
    const int before = hits;
    CHECK_THROWS_AS(t.translate("busy", "id", "en"), TranslationError);
    CHECK(hits - before == 2);

    server.stop();
    thread.join();

    HttpBackendConfig dead = cfg;
    dead.timeout_seconds = 0.5;
    HttpBackend closed(dead);
    CHECK_THROWS_AS(closed.translate("halo", "id", "en"), BackendUnavailable);
    CHECK_THROWS_AS(HttpBackend(HttpBackendConfig{"not a url", "", 1, ""}), ConfigError);
  }
}
