// Copyright 2026 The narrmem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <thread>

#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"
#include "narrmem/llm/embedding.hpp"
#include "narrmem/llm/gateway.hpp"
#include "narrmem/llm/schema.hpp"
#include "narrmem/memory/vector_math.hpp"

namespace narrmem {
namespace {

using nlohmann::json;

PromptCatalog tiny_catalog() {
  PromptCatalog c;
  c.add({"plot", "Plot: {plot}", json::parse(R"({"type":"object","required":["answer"],
         "properties":{"answer":{"type":"string","minLength":1}}})"),
         1});
  return c;
}

std::string error_code(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return "";
}

TEST(RenderTest, Substitution) {
  EXPECT_EQ(tiny_catalog().render("plot", {{"plot", "X"}}), "Plot: X");
}

TEST(RenderTest, ValuesAreNotRescanned) {
  EXPECT_EQ(tiny_catalog().render("plot", {{"plot", "{plot}"}}), "Plot: {plot}");
}

TEST(RenderTest, MissingVariableNamesPlaceholder) {
  try {
    tiny_catalog().render("plot", {});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "MISSING_VARIABLE");
    EXPECT_NE(std::string(e.what()).find("{plot}"), std::string::npos);
  }
}

TEST(RenderTest, ExtraVariableIsAnError) {
  EXPECT_EQ(error_code([] { tiny_catalog().render("plot", {{"plot", "X"}, {"extra", "Y"}}); }),
            "UNUSED_VARIABLE");
  EXPECT_EQ(error_code([] { tiny_catalog().render("nope", {}); }), "UNKNOWN_TEMPLATE");
}

TEST(RenderTest, JsonBracesAreNotPlaceholders) {
  PromptTemplate t{"t", "Reply {\"a\": 1} about {topic}.", json::object(), 1};
  EXPECT_EQ(t.placeholders(), std::vector<std::string>{"topic"});
  EXPECT_EQ(render_template(t, {{"topic", "cats"}}), "Reply {\"a\": 1} about cats.");
}

TEST(SchemaTest, Subset) {
  auto schema = json::parse(R"({"type":"object","required":["xs"],"properties":{
      "xs":{"type":"array","minItems":1,"items":{"type":"string","enum":["a","b"]}}}})");
  EXPECT_FALSE(validate_schema(json::parse(R"({"xs":["a"]})"), schema));
  EXPECT_TRUE(validate_schema(json::parse(R"({"xs":[]})"), schema));
  EXPECT_TRUE(validate_schema(json::parse(R"({"xs":["c"]})"), schema));
  EXPECT_TRUE(validate_schema(json::parse(R"({})"), schema));
  EXPECT_TRUE(validate_schema(json::parse(R"([1])"), schema));
  auto err = validate_schema(json::parse(R"({"xs":["a", 3]})"), schema);
  ASSERT_TRUE(err);
  EXPECT_NE(err->find("/xs/1"), std::string::npos);
}

TEST(ExtractJsonTest, ToleratesFencesAndProse) {
  EXPECT_EQ(*extract_json("{\"a\":1}"), json({{"a", 1}}));
  EXPECT_EQ(*extract_json("```json\n{\"a\":1}\n```"), json({{"a", 1}}));
  EXPECT_EQ(*extract_json("Sure! {\"a\":1} Hope this helps."), json({{"a", 1}}));
  EXPECT_FALSE(extract_json("no json here"));
}

TEST(FingerprintTest, StableAndSensitive) {
  auto fp = request_fingerprint("plot", 1, "Plot: X");
  EXPECT_EQ(fp, request_fingerprint("plot", 1, "Plot: X"));
  EXPECT_EQ(fp.size(), 64u);
  // sha256("plot\n1\nPlot: X"), computed independently.
  EXPECT_EQ(fp, sha256_hex("plot\n1\nPlot: X"));
  EXPECT_NE(fp, request_fingerprint("plot", 2, "Plot: X"));
  EXPECT_NE(fp, request_fingerprint("plot2", 1, "Plot: X"));
  EXPECT_NE(fp, request_fingerprint("plot", 1, "Plot: Y"));
}

std::shared_ptr<FunctionChatProvider> failing_transport() {
  return std::make_shared<FunctionChatProvider>([](const LlmRequest &) -> std::string {
    throw Error("TRANSPORT_ERROR", "network used in replay mode");
  });
}

TEST(GatewayTest, ReplayHitMakesNoNetworkCalls) {
  auto fixtures = std::make_shared<FixtureStore>();
  const std::string fp = request_fingerprint("plot", 1, "Plot: X");
  fixtures->put({fp, "plot", 1, "Plot: X", "{\"answer\":\"42\"}", json({{"answer", "42"}})});
  auto transport = failing_transport();
  LlmGateway gw(tiny_catalog(), transport, fixtures, {GatewayMode::kReplay});
  auto r = gw.complete_structured("plot", {{"plot", "X"}});
  EXPECT_EQ(r.parsed["answer"], "42");
  EXPECT_TRUE(r.from_fixture);
  EXPECT_EQ(r.fingerprint, fp);
  EXPECT_EQ(transport->calls(), 0u);
}

TEST(GatewayTest, ReplayMissNamesFingerprint) {
  auto transport = failing_transport();
  LlmGateway gw(tiny_catalog(), transport, std::make_shared<FixtureStore>(), {GatewayMode::kReplay});
  try {
    gw.complete_structured("plot", {{"plot", "X"}});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "REPLAY_MISS");
    EXPECT_NE(std::string(e.what()).find(request_fingerprint("plot", 1, "Plot: X")),
              std::string::npos);
  }
  EXPECT_EQ(transport->calls(), 0u);
}

TEST(GatewayTest, BadThenGoodRetriesOnce) {
  int n = 0;
  auto provider = std::make_shared<FunctionChatProvider>([&](const LlmRequest &req) {
    if (n++ == 0) return std::string("{\"wrong\": true}");
    EXPECT_NE(req.rendered_text.find("rejected"), std::string::npos);
    return std::string("{\"answer\": \"ok\"}");
  });
  LlmGateway gw(tiny_catalog(), provider, nullptr, {GatewayMode::kLive});
  auto r = gw.complete_structured("plot", {{"plot", "X"}});
  EXPECT_EQ(r.parsed["answer"], "ok");
  EXPECT_EQ(r.retries, 1);
  EXPECT_EQ(provider->calls(), 2u);
  EXPECT_EQ(gw.stats().retries, 1u);
}

TEST(GatewayTest, SchemaViolationAfterRetryBudget) {
  auto provider = std::make_shared<FunctionChatProvider>(
      [](const LlmRequest &) { return std::string("not json"); });
  LlmGateway gw(tiny_catalog(), provider, nullptr, {GatewayMode::kLive, 2});
  EXPECT_EQ(error_code([&] { gw.complete_structured("plot", {{"plot", "X"}}); }),
            "SCHEMA_VIOLATION");
  EXPECT_EQ(provider->calls(), 3u);
}

TEST(GatewayTest, TemperatureZeroByDefault) {
  double seen = -1;
  auto provider = std::make_shared<FunctionChatProvider>([&](const LlmRequest &req) {
    seen = req.temperature;
    return std::string("{\"answer\": \"ok\"}");
  });
  LlmGateway gw(tiny_catalog(), provider, nullptr, {GatewayMode::kLive});
  gw.complete_structured("plot", {{"plot", "X"}});
  EXPECT_EQ(seen, 0.0);
}

TEST(GatewayTest, RecordThenReplayRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "narrmem_fixture_test";
  std::filesystem::remove_all(dir);
  auto provider = std::make_shared<FunctionChatProvider>(
      [](const LlmRequest &) { return std::string("{\"answer\": \"recorded\"}"); });
  {
    LlmGateway gw(tiny_catalog(), provider, std::make_shared<FixtureStore>(dir),
                  {GatewayMode::kRecord});
    gw.complete_structured("plot", {{"plot", "X"}});
    // A second record-mode call is served from the fixture.
    gw.complete_structured("plot", {{"plot", "X"}});
  }
  EXPECT_EQ(provider->calls(), 1u);
  LlmGateway replay(tiny_catalog(), failing_transport(), std::make_shared<FixtureStore>(dir),
                    {GatewayMode::kReplay});
  EXPECT_EQ(replay.complete_structured("plot", {{"plot", "X"}}).parsed["answer"], "recorded");
  std::filesystem::remove_all(dir);
}

TEST(GatewayTest, ConcurrentReplay) {
  auto fixtures = std::make_shared<FixtureStore>();
  for (int i = 0; i < 20; ++i) {
    std::string rendered = "Plot: " + std::to_string(i);
    fixtures->put({request_fingerprint("plot", 1, rendered), "plot", 1, rendered, "",
                   json({{"answer", std::to_string(i)}})});
  }
  LlmGateway gw(tiny_catalog(), failing_transport(), fixtures, {GatewayMode::kReplay});
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 20; ++i)
        if (gw.complete_structured("plot", {{"plot", std::to_string(i)}}).parsed["answer"] ==
            std::to_string(i))
          ++ok;
    });
  for (auto &th : threads) th.join();
  EXPECT_EQ(ok.load(), 80);
}

TEST(ScriptedProviderTest, RulesAndEcho) {
  ScriptedChatProvider p(json::parse(R"({"rules":[
    {"template":"a","contains":["Meredith"],"response":{"answer":"m"}},
    {"template":"a","response":"{\"answer\":\"default\"}"},
    {"template":"b","echo_after":"INPUT_JSON:"}]})"));
  EXPECT_EQ(p.complete({"a", 1, "about Meredith"}).raw_text, "{\"answer\":\"m\"}");
  EXPECT_EQ(p.complete({"a", 1, "about Derek"}).raw_text, "{\"answer\":\"default\"}");
  EXPECT_EQ(p.complete({"b", 1, "x\nINPUT_JSON: {\"s\":[1]}\ny"}).raw_text, "{\"s\":[1]}");
  EXPECT_EQ(error_code([&] { p.complete({"c", 1, "?"}); }), "SCRIPT_NO_RULE");
}

TEST(CatalogTest, ShippedCatalogLoads) {
  auto catalog = PromptCatalog::load(NARRMEM_PROMPTS_DIR);
  EXPECT_EQ(catalog.ids().size(), 14u);
  for (const auto &id : catalog.ids()) {
    const auto &t = catalog.get(id);
    EXPECT_FALSE(t.placeholders().empty()) << id;
    EXPECT_EQ(t.response_schema.value("type", ""), "object") << id;
    PromptVariables vars;
    for (const auto &p : t.placeholders()) vars[p] = "value";
    EXPECT_EQ(catalog.render(id, vars).find('{' + t.placeholders()[0] + '}'), std::string::npos);
  }
  // Agent 2 may only emit anthology arcs.
  auto bad = json::parse(R"({"arcs":[{"title":"t","description":"d","arc_type":"Soap"}]})");
  EXPECT_TRUE(validate_schema(bad, catalog.get("agent2_extract_anthology").response_schema));
}

TEST(EmbeddingTest, Deterministic) {
  HashedNgramEmbedder e;
  auto v = embed_texts(e, {"Meredith meets Derek.", "Meredith meets Derek."});
  EXPECT_EQ(v[0], v[1]);
  EXPECT_NEAR(l2_norm(v[0]), 1.0, 1e-6);
}

TEST(EmbeddingTest, EmptyText) {
  HashedNgramEmbedder e;
  EXPECT_EQ(error_code([&] { embed_texts(e, {"a", ""}); }), "EMPTY_TEXT");
  EXPECT_EQ(error_code([&] { embed_texts(e, {}); }), "EMPTY_INPUT");
}

TEST(EmbeddingTest, BatchShape) {
  HashedNgramEmbedder e;
  auto v = embed_texts(e, {"one", "two", "three"});
  ASSERT_EQ(v.size(), 3u);
  for (const auto &x : v) EXPECT_EQ(x.size(), 256u);
}

TEST(EmbeddingTest, HandComputedBuckets) {
  // "ab" pads to " ab ": trigrams " ab" and "ab ". FNV-1a 32 computed here
  // byte by byte, independently of the implementation's loop.
  auto fnv = [](std::initializer_list<unsigned char> bytes) {
    uint32_t h = 2166136261u;
    for (auto b : bytes) h = (h ^ b) * 16777619u;
    return h;
  };
  const size_t d = 16;
  std::vector<double> expect(d, 0.0);
  expect[fnv({' ', 'a', 'b'}) % d] += 1;
  expect[fnv({'a', 'b', ' '}) % d] += 1;
  double norm = 0;
  for (double x : expect) norm += x * x;
  HashedNgramEmbedder e(d);
  auto v = e.embed({"AB"})[0];
  for (size_t i = 0; i < d; ++i) EXPECT_NEAR(v[i], expect[i] / std::sqrt(norm), 1e-7);
}

TEST(EmbeddingTest, LexicalSimilarityIsMeaningful) {
  HashedNgramEmbedder e;
  auto v = e.embed({"Meredith and Derek hide their romance", "Meredith and Derek hide the romance",
                    "A patient needs a liver transplant"});
  EXPECT_GT(cosine_similarity(v[0], v[1]), cosine_similarity(v[0], v[2]));
}

}  // namespace
}  // namespace narrmem

namespace narrmem {
namespace {

// The bundled mini-season recording: every catalog template is exercised,
// fingerprints match file names and the recorded text, and each recorded
// response satisfies the current schema.
TEST(BundledFixturesTest, CoverCatalogAndValidate) {
  const std::filesystem::path dir = std::filesystem::path(NARRMEM_DATA_DIR) / "mini-season/fixtures";
  auto catalog = PromptCatalog::load(NARRMEM_PROMPTS_DIR);
  FixtureStore store(dir);
  ASSERT_GT(store.size(), 0u);
  std::set<std::string> used;
  for (const auto &f : store.all()) {
    SCOPED_TRACE(f.fingerprint + " " + f.template_id);
    EXPECT_TRUE(std::filesystem::exists(dir / (f.fingerprint + ".json")));
    EXPECT_EQ(f.fingerprint, sha256_hex(f.template_id + "\n" + std::to_string(f.version) + "\n" +
                                        f.rendered_text));
    const auto &tmpl = catalog.get(f.template_id);
    EXPECT_EQ(f.version, tmpl.version);
    EXPECT_EQ(validate_schema(f.parsed, tmpl.response_schema), std::nullopt);
    EXPECT_EQ(extract_json(f.raw_text), std::optional<nlohmann::json>(f.parsed));
    used.insert(f.template_id);
  }
  auto ids = catalog.ids();
  EXPECT_EQ(used, std::set<std::string>(ids.begin(), ids.end()));
}

}  // namespace
}  // namespace narrmem
