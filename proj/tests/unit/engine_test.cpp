#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rguard/engine.hpp"
#include "rguard/hashing.hpp"
#include "support/corpus.hpp"
#include "support/test_helpers.hpp"

namespace rguard {
namespace {

using testing::CorpusEntry;
using testing::TempDir;

std::string statements(int n) {
  std::string body;
  for (int i = 0; i < n; ++i) body += "  total = total + " + std::to_string(i) + ";\n";
  return body;
}

// Header, `let`, n-4 assignments, return and closing brace: n lines of code.
SourceFunction function_with_loc(int n) {
  return testing::parse_one("function big(a) {\n  let total = a;\n" + statements(n - 4) +
                            "  return total;\n}\n");
}

CodeSmell first_smell(const SourceFunction& fn, SmellKind kind) {
  for (const CodeSmell& s : detect_all(fn, Thresholds{}, SeverityOrder{}))
    if (s.kind == kind) return s;
  throw Error("smell not found");
}

const CorpusEntry& entry_of_kind(SmellKind kind) {
  static const std::vector<CorpusEntry> corpus = testing::load_corpus("oracle");
  for (const CorpusEntry& c : corpus)
    if (c.smell == kind) return c;
  throw Error("no fixture of that kind");
}

RefactorTarget target_of(const CorpusEntry& c) {
  auto [fn, smell] = testing::corpus_target(c);
  return {c.source, fn, smell};
}

std::shared_ptr<OracleFixtures> fixtures_for(const CorpusEntry& c) {
  auto fx = std::make_shared<OracleFixtures>();
  fx->add(target_of(c).function.text, c.refactored);
  return fx;
}

/// Answers by temperature slot; an empty entry means a transport failure.
class ScriptedProvider final : public Provider {
 public:
  ScriptedProvider(std::string id, std::vector<std::string> outputs)
      : id_(std::move(id)), outputs_(std::move(outputs)) {}
  const std::string& id() const override { return id_; }
  ProviderResult complete(const ProviderRequest& request) const override {
    ++calls;
    const auto slot = static_cast<std::size_t>(request.temperature / 0.2 + 0.5);
    if (slot >= outputs_.size() || outputs_[slot].empty()) throw TransportError("scripted failure");
    return {outputs_[slot], id_, 1, "r" + std::to_string(slot)};
  }
  mutable std::atomic<int> calls{0};

 private:
  std::string id_;
  std::vector<std::string> outputs_;
};

// ---- prompt -----------------------------------------------------------------

TEST(Prompt, SectionsAreLayeredInFixedOrder) {
  const RefactorTarget t = target_of(entry_of_kind(SmellKind::ComplexConditional));
  const PromptSpec spec = build_prompt(t.function, t.smell);
  const PromptSections sections = spec.sections();
  std::vector<std::string> names;
  for (const auto& [name, _] : sections) names.push_back(name);
  EXPECT_EQ(names, (std::vector<std::string>{"language", "function_kind", "smell", "smell_location",
                                             "constraints", "source"}));
  EXPECT_EQ(spec.function_source, t.function.text);
  EXPECT_NE(spec.strategy_hint.find("Decompose the conditional"), std::string::npos);
  EXPECT_NE(spec.constraints.find("behavior"), std::string::npos);
  EXPECT_NE(spec.constraints.find("minimal"), std::string::npos);
  // Location is relative to the function's first line.
  EXPECT_EQ(spec.smell_span.start_line, t.smell.span.start_line - t.function.span.start_line + 1);
  EXPECT_FALSE(spec.size_warning);
}

TEST(Prompt, HashIsStableAndContentSensitive) {
  const RefactorTarget t = target_of(entry_of_kind(SmellKind::BumpyRoad));
  const PromptSpec a = build_prompt(t.function, t.smell);
  const PromptSpec b = build_prompt(t.function, t.smell);
  EXPECT_EQ(a.sha256(), b.sha256());
  EXPECT_EQ(a.sha256().size(), 64u);
  PromptSpec c = a;
  c.function_source += " ";
  EXPECT_NE(a.sha256(), c.sha256());
}

TEST(Prompt, EveryKindHasADistinctStrategy) {
  std::set<std::string> hints;
  for (SmellKind k : kAllSmellKinds) hints.insert(std::string(strategy_hint(k)));
  EXPECT_EQ(hints.size(), kAllSmellKinds.size());
}

TEST(Prompt, RejectsSmellFromAnotherFunction) {
  const RefactorTarget a = target_of(entry_of_kind(SmellKind::ComplexMethod));
  CodeSmell foreign = a.smell;
  foreign.function = "somethingElse";
  EXPECT_THROW(build_prompt(a.function, foreign), Error);
}

TEST(SizeLimits, BoundaryAt130LinesOfCode) {
  const SourceFunction ok = function_with_loc(130);
  const SourceFunction too_big = function_with_loc(131);
  ASSERT_EQ(ok.loc, 130);
  ASSERT_EQ(too_big.loc, 131);
  EXPECT_NO_THROW(build_prompt(ok, first_smell(ok, SmellKind::LargeMethod)));
  try {
    build_prompt(too_big, first_smell(too_big, SmellKind::LargeMethod));
    FAIL() << "expected FunctionTooLarge";
  } catch (const FunctionTooLarge& e) {
    EXPECT_NE(std::string(e.what()).find("130"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("131"), std::string::npos);
  }
}

TEST(SizeLimits, SoftLimitOnlyWarns) {
  const SourceFunction fn = function_with_loc(71);
  EXPECT_TRUE(build_prompt(fn, first_smell(fn, SmellKind::LargeMethod)).size_warning);
  const SourceFunction at = function_with_loc(70);
  EXPECT_FALSE(build_prompt(at, first_smell(at, SmellKind::LargeMethod)).size_warning);
}

TEST(SizeLimits, ConfigurableCeiling) {
  const SourceFunction fn = function_with_loc(90);
  EngineLimits limits;
  limits.max_function_loc = 80;
  EXPECT_THROW(build_prompt(fn, first_smell(fn, SmellKind::LargeMethod), limits), FunctionTooLarge);
}

// ---- selection --------------------------------------------------------------

TEST(Selection, FirstMatchingRuleWins) {
  const SourceFunction fn = function_with_loc(80);
  const CodeSmell smell = first_smell(fn, SmellKind::LargeMethod);
  SelectionPolicy policy;
  policy.default_provider_id = "fallback";
  EXPECT_EQ(select_provider(policy, fn, smell), "fallback");

  SelectionRule by_kind;
  by_kind.smell_kind = SmellKind::ComplexMethod;
  by_kind.provider_id = "cm";
  SelectionRule by_size;
  by_size.loc_range = IntRange{71, 130};
  by_size.provider_id = "large";
  SelectionRule catch_all;
  catch_all.language_tag = std::string(MiniLangAdapter::kTag);
  catch_all.provider_id = "minilang";
  policy.rules = {by_kind, by_size, catch_all};
  EXPECT_EQ(select_provider(policy, fn, smell), "large");

  const SourceFunction small = function_with_loc(10);
  CodeSmell pretend = smell;
  pretend.function = small.name;
  EXPECT_EQ(select_provider(policy, small, pretend), "minilang");
}

TEST(Selection, CyclomaticRangeIsInclusive) {
  const RefactorTarget t = target_of(entry_of_kind(SmellKind::ComplexMethod));
  const int cc = t.smell.metric_value;
  SelectionRule rule;
  rule.cc_range = IntRange{cc, cc};
  rule.provider_id = "exact";
  EXPECT_TRUE(rule.matches(t.function, t.smell));
  rule.cc_range = IntRange{cc + 1, cc + 5};
  EXPECT_FALSE(rule.matches(t.function, t.smell));
}

// ---- providers --------------------------------------------------------------

TEST(Providers, ExtractCodeBlockTakesFirstFence) {
  EXPECT_EQ(extract_code_block("intro\n```js\nfunction a() {}\n```\n```\nother\n```"), "function a() {}\n");
  EXPECT_EQ(extract_code_block("no code here"), "");
}

TEST(Providers, MockBehaviorNamesRoundTrip) {
  for (MockBehavior b : {MockBehavior::Identity, MockBehavior::Oracle, MockBehavior::MutateLiteral,
                         MockBehavior::DropCall, MockBehavior::EmptyStub, MockBehavior::BreakSyntax})
    EXPECT_EQ(mock_behavior_from_string(to_string(b)), b);
  EXPECT_FALSE(mock_behavior_from_string("psychic"));
}

TEST(Providers, OracleFixturesLoadFromCorpusDirectory) {
  const auto fx = OracleFixtures::load_dir(std::string(RGUARD_FIXTURE_DIR) + "/oracle");
  EXPECT_EQ(fx.size(), testing::load_corpus("oracle").size());
  const CorpusEntry& c = entry_of_kind(SmellKind::DeepNestedLogic);
  const std::string* hit = fx.find(target_of(c).function.text);
  ASSERT_NE(hit, nullptr);
  EXPECT_EQ(*hit, c.refactored);
}

TEST(Providers, MutatorsChangeTheText) {
  const CorpusEntry& c = entry_of_kind(SmellKind::ComplexMethod);
  const RefactorTarget t = target_of(c);
  const PromptSpec spec = build_prompt(t.function, t.smell);
  const ProviderRequest req{spec.sections(), 0.0, 64 * 1024, spec.sha256()};
  const auto fx = fixtures_for(c);
  for (MockBehavior b : {MockBehavior::MutateLiteral, MockBehavior::DropCall, MockBehavior::EmptyStub,
                         MockBehavior::BreakSyntax}) {
    const std::string out = MockProvider("m", b, fx).complete(req).refactored_source;
    EXPECT_NE(out, c.refactored) << to_string(b);
    EXPECT_NE(out, t.function.text) << to_string(b);
  }
  EXPECT_EQ(MockProvider("m", MockBehavior::Identity).complete(req).refactored_source, t.function.text);
  EXPECT_EQ(MockProvider("m", MockBehavior::Oracle, fx).complete(req).refactored_source, c.refactored);
  EXPECT_THROW(MockProvider("m", MockBehavior::Oracle).complete(req), TransportError);
}

// ---- engine -----------------------------------------------------------------

RefactorEngine engine_with(std::shared_ptr<const Provider> provider) {
  SelectionPolicy policy;
  policy.default_provider_id = provider->id();
  RefactorEngine engine(AnalysisConfig{}, policy);
  engine.add_provider(std::move(provider));
  return engine;
}

TEST(Engine, OraclePoolCollapsesToOneHighCandidate) {
  const CorpusEntry& c = entry_of_kind(SmellKind::BumpyRoad);
  auto provider = std::make_shared<MockProvider>("oracle", MockBehavior::Oracle, fixtures_for(c));
  const GenerationResult gen = engine_with(provider).generate_candidates(target_of(c), 3);
  EXPECT_EQ(gen.provider_id, "oracle");
  ASSERT_EQ(gen.candidates.size(), 1u);
  EXPECT_EQ(gen.candidates[0].report.confidence, Confidence::High);
  EXPECT_GT(gen.candidates[0].health_change(), 0.0);
  EXPECT_GT(gen.candidates[0].changed_lines, 0);
}

TEST(Engine, IdentityIsDiscarded) {
  const CorpusEntry& c = entry_of_kind(SmellKind::ComplexConditional);
  auto provider = std::make_shared<MockProvider>("same", MockBehavior::Identity);
  try {
    engine_with(provider).generate_candidates(target_of(c), 2);
    FAIL() << "expected AllCandidatesDiscarded";
  } catch (const AllCandidatesDiscarded& e) {
    ASSERT_EQ(e.discarded().size(), 1u);
    EXPECT_EQ(e.discarded()[0].report.confidence, Confidence::Discard);
  }
}

TEST(Engine, EveryCallFailingIsProviderUnavailable) {
  const CorpusEntry& c = entry_of_kind(SmellKind::ComplexConditional);
  auto provider = std::make_shared<ScriptedProvider>("down", std::vector<std::string>{});
  EXPECT_THROW(engine_with(provider).generate_candidates(target_of(c), 3), ProviderUnavailable);
  EXPECT_EQ(provider->calls.load(), 3);
}

TEST(Engine, PartialFailuresStillYieldCandidates) {
  const CorpusEntry& c = entry_of_kind(SmellKind::ComplexConditional);
  auto provider = std::make_shared<ScriptedProvider>("flaky", std::vector<std::string>{"", c.refactored, ""});
  const GenerationResult gen = engine_with(provider).generate_candidates(target_of(c), 3);
  ASSERT_EQ(gen.candidates.size(), 1u);
  EXPECT_EQ(gen.candidates[0].result.raw_response_id, "r1");
}

TEST(Engine, UnknownProviderIsAConfigError) {
  const CorpusEntry& c = entry_of_kind(SmellKind::ComplexConditional);
  SelectionPolicy policy;
  policy.default_provider_id = "ghost";
  const RefactorEngine engine(AnalysisConfig{}, policy);
  EXPECT_THROW(engine.generate_candidates(target_of(c)), ConfigError);
}

TEST(Engine, OnlySurvivorsAreReturned) {
  static const std::vector<CorpusEntry> mids = testing::load_corpus("mid");
  ASSERT_FALSE(mids.empty());
  const CorpusEntry& mid = mids.front();
  const RefactorTarget t = target_of(mid);

  // A syntax error, the Mid answer and an unchanged copy.
  const std::string broken = "function " + t.function.name + "( {";
  const std::string trivial_identity = t.function.text;
  auto provider = std::make_shared<ScriptedProvider>(
      "mix", std::vector<std::string>{broken, mid.refactored, trivial_identity});
  const GenerationResult gen = engine_with(provider).generate_candidates(t, 3);
  ASSERT_EQ(gen.candidates.size(), 1u);
  EXPECT_EQ(gen.candidates[0].report.confidence, Confidence::Mid);
}

TEST(Engine, OrderingPrefersConfidenceThenGainThenSmallerChange) {
  const CorpusEntry& c = entry_of_kind(SmellKind::ComplexMethod);
  const RefactorTarget t = target_of(c);
  // The oracle answer plus a variant with an extra trailing blank comment
  // line: same confidence and gain, more changed lines.
  const std::string padded = c.refactored + "\n// spare\n";
  auto provider = std::make_shared<ScriptedProvider>("two", std::vector<std::string>{padded, c.refactored});
  const GenerationResult gen = engine_with(provider).generate_candidates(t, 2);
  ASSERT_EQ(gen.candidates.size(), 2u);
  EXPECT_EQ(gen.candidates[0].result.refactored_source, c.refactored);
  EXPECT_LT(gen.candidates[0].changed_lines, gen.candidates[1].changed_lines);
}

TEST(Engine, RepeatedRunsAreDeterministic) {
  const CorpusEntry& c = entry_of_kind(SmellKind::LargeMethod);
  auto provider = std::make_shared<MockProvider>("oracle", MockBehavior::Oracle, fixtures_for(c));
  const RefactorEngine engine = engine_with(provider);
  const GenerationResult a = engine.generate_candidates(target_of(c), 3);
  const GenerationResult b = engine.generate_candidates(target_of(c), 3);
  ASSERT_EQ(a.candidates.size(), b.candidates.size());
  EXPECT_EQ(a.candidates[0].report.rationale, b.candidates[0].report.rationale);
  EXPECT_EQ(a.prompt.sha256(), b.prompt.sha256());
}

TEST(Engine, TooLargeFunctionNeverReachesTheProvider) {
  const SourceFunction fn = function_with_loc(131);
  auto provider = std::make_shared<ScriptedProvider>("count", std::vector<std::string>{"x"});
  const RefactorEngine engine = engine_with(provider);
  std::string unit = fn.text + "\n";
  EXPECT_THROW(engine.generate_candidates({unit, fn, first_smell(fn, SmellKind::LargeMethod)}),
               FunctionTooLarge);
  EXPECT_EQ(provider->calls.load(), 0);
}

TEST(Engine, ReplayProviderServesRecordedResponse) {
  const CorpusEntry& c = entry_of_kind(SmellKind::DeepNestedLogic);
  const RefactorTarget t = target_of(c);
  TempDir dir;
  const nlohmann::json rec = {{"prompt_sha256", build_prompt(t.function, t.smell).sha256()},
                              {"response", "Here you go:\n```js\n" + c.refactored + "\n```\n"}};
  testing::write_file(dir / "rec.json", rec.dump());
  auto provider = std::make_shared<ReplayProvider>("replay", dir.path());
  EXPECT_EQ(provider->size(), 1u);
  const GenerationResult gen = engine_with(provider).generate_candidates(t, 1);
  ASSERT_EQ(gen.candidates.size(), 1u);
  EXPECT_EQ(gen.candidates[0].report.confidence, Confidence::High);

  const RefactorTarget other = target_of(entry_of_kind(SmellKind::BumpyRoad));
  EXPECT_THROW(engine_with(provider).generate_candidates(other, 1), ProviderUnavailable);
}

// ---- HTTP provider ------------------------------------------------------------

class FakeCompletionServer {
 public:
  explicit FakeCompletionServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat", [handler](const httplib::Request& req, httplib::Response& res) { handler(req, res); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeCompletionServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpProvider, SendsChatRequestAndExtractsCode) {
  const CorpusEntry& c = entry_of_kind(SmellKind::ComplexConditional);
  const RefactorTarget t = target_of(c);
  std::mutex mu;
  std::vector<nlohmann::json> seen;
  std::vector<std::string> auth;
  FakeCompletionServer server([&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mu);
      seen.push_back(nlohmann::json::parse(req.body));
      auth.push_back(req.get_header_value("Authorization"));
    }
    const nlohmann::json reply = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "```\n" + c.refactored + "\n```"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  auto provider = std::make_shared<HttpProvider>(
      "remote", HttpProvider::Options{server.endpoint(), "test-model", {{"Authorization", "Bearer k"}}, 5});
  const GenerationResult gen = engine_with(provider).generate_candidates(t, 2);
  ASSERT_EQ(gen.candidates.size(), 1u);
  EXPECT_EQ(gen.candidates[0].report.confidence, Confidence::High);

  ASSERT_EQ(seen.size(), 2u);
  std::set<double> temps;
  for (const nlohmann::json& body : seen) {
    EXPECT_EQ(body["model"], "test-model");
    ASSERT_EQ(body["messages"].size(), 2u);
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_EQ(body["messages"][1]["role"], "user");
    EXPECT_NE(body["messages"][1]["content"].get<std::string>().find(t.function.text), std::string::npos);
    temps.insert(body["temperature"].get<double>());
  }
  EXPECT_EQ(temps, (std::set<double>{0.0, 0.2}));
  EXPECT_EQ(auth, (std::vector<std::string>{"Bearer k", "Bearer k"}));
}

TEST(HttpProvider, ErrorsBecomeTransportErrors) {
  FakeCompletionServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("busy", "text/plain");
  });
  const RefactorTarget t = target_of(entry_of_kind(SmellKind::ComplexConditional));
  const PromptSpec spec = build_prompt(t.function, t.smell);
  const ProviderRequest req{spec.sections(), 0.0, 64 * 1024, spec.sha256()};
  EXPECT_THROW(HttpProvider("r", {server.endpoint(), "m", {}, 5}).complete(req), TransportError);
  EXPECT_THROW(HttpProvider("r", {"http://127.0.0.1:1/x", "m", {}, 1}).complete(req), TransportError);
}

TEST(HttpProvider, MalformedChoicesAreTransportErrors) {
  FakeCompletionServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[{"text":"nope"}]})", "application/json");
  });
  const RefactorTarget t = target_of(entry_of_kind(SmellKind::ComplexConditional));
  const PromptSpec spec = build_prompt(t.function, t.smell);
  const ProviderRequest req{spec.sections(), 0.0, 64 * 1024, spec.sha256()};
  EXPECT_THROW(HttpProvider("r", {server.endpoint(), "m", {}, 5}).complete(req), TransportError);
}

TEST(HttpProvider, OnlyPlainHttpEndpoints) {
  EXPECT_THROW(HttpProvider("r", {"https://example.com/v1", "m", {}, 5}), ConfigError);
  EXPECT_THROW(HttpProvider("r", {"ftp://x", "m", {}, 5}), ConfigError);
  EXPECT_THROW(HttpProvider("r", {"http://", "m", {}, 5}), ConfigError);
}

}  // namespace
}  // namespace rguard
