#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "advisory_fixture.hpp"
#include "aicare/advisory/client.hpp"
#include "aicare/advisory/narrative.hpp"
#include "aicare/advisory/prompt.hpp"
#include "test_util.hpp"

namespace adv = aicare::advisory;
using aicare::testing::fixture_assessment;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

const char* kCleanReply =
    "## Key Feature Identification\n"
    "Albumin is low relative to the cohort and Creatinine is high.\n"
    "\n"
    "## Risk Analysis\n"
    "The predicted risk of 87.3% reflects declining nutritional status.\n"
    "\n"
    "## Personalized Advice\n"
    "1. Review dialysis adequacy.\n"
    "2. Arrange dietitian input.\n";

adv::Narrative llm_narrative(const std::string& text) {
  const auto s = adv::parse_sections(text);
  adv::Narrative n;
  n.text = text;
  n.source = adv::NarrativeSource::Llm;
  if (s) {
    n.key_features = s->key_features;
    n.risk_analysis = s->risk_analysis;
    n.advice = s->advice;
  }
  return n;
}

bool has_kind(const adv::ValidationReport& r, adv::ViolationKind kind) {
  for (const auto& v : r.violations) {
    if (v.kind == kind) return true;
  }
  return false;
}

}  // namespace

TEST(Prompt, MatchesGoldenRendering) {
  const auto p = adv::build_prompt(adv::mortality_task_definition(), fixture_assessment(), 2, 3);
  EXPECT_EQ(p.system_text, slurp(aicare::testing::data_path("advisory/system_prompt.golden.txt")));
  EXPECT_EQ(p.user_text, slurp(aicare::testing::data_path("advisory/user_prompt.golden.txt")));
}

TEST(Prompt, FormattingRules) {
  const auto a = fixture_assessment();
  const auto p = adv::build_prompt("task", a, 2, 2);
  EXPECT_NE(p.user_text.find("87.3%"), std::string::npos);
  EXPECT_EQ(p.risk_percent, "87.3");
  EXPECT_EQ(p.top_features.size(), 2u);
  EXPECT_NE(p.user_text.find("1. Albumin: 45.00%\n2. Creatinine: 30.00%\n\n"), std::string::npos);
  EXPECT_EQ(count(p.user_text, "%\n"), 3u);  // risk line plus two weight lines
  EXPECT_NE(p.user_text.find("- Hemoglobin: 98 g/L (not measured at this visit)\n"), std::string::npos);
  EXPECT_TRUE(p.warnings.empty());

  const auto clamped = adv::build_prompt("task", a, 0, 99);
  EXPECT_EQ(clamped.top_features.size(), 4u);
  EXPECT_EQ(clamped.warnings.size(), 1u);
  EXPECT_THROW(adv::build_prompt("task", a, 3, 2), std::out_of_range);
  EXPECT_THROW(adv::build_prompt("task", a, 0, 0), std::invalid_argument);
}

TEST(Prompt, InjectiveInRiskTopKAndValues) {
  const auto base = fixture_assessment();
  const auto ref = adv::build_prompt("task", base, 2, 3).user_text;

  auto risk = base;
  risk.calibrated_risks[2] = 0.874;
  EXPECT_NE(adv::build_prompt("task", risk, 2, 3).user_text, ref);

  auto order = base;
  order.importance[8 + 1] = 0.15;
  order.importance[8 + 2] = 0.30;
  EXPECT_NE(adv::build_prompt("task", order, 2, 3).user_text, ref);

  auto value = base;
  value.values[8 + 3] = 61.000001;
  EXPECT_NE(adv::build_prompt("task", value, 2, 3).user_text, ref);
}

TEST(Sections, ParsesHeadingsTolerantly) {
  const auto s = adv::parse_sections(kCleanReply);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->key_features, "Albumin is low relative to the cohort and Creatinine is high.");
  EXPECT_EQ(s->advice, "1. Review dialysis adequacy.\n2. Arrange dietitian input.");

  const auto bold = adv::parse_sections(
      "**1. Key feature identification:**\nA\n**2. Risk analysis:**\nB\n**3. Personalised advice:**\nC\n");
  ASSERT_TRUE(bold.has_value());
  EXPECT_EQ(bold->risk_analysis, "B");
  EXPECT_FALSE(adv::parse_sections("Just some text without structure.").has_value());
}

TEST(Validator, CleanNarrativePasses) {
  const auto r = adv::validate_narrative(llm_narrative(kCleanReply), fixture_assessment(), 2);
  EXPECT_TRUE(r.passed) << r.to_json().dump();
}

TEST(Validator, FlagsNumericLeaks) {
  const auto a = fixture_assessment();
  std::string text = kCleanReply;
  text.replace(text.find("is low relative"), 15, "= 32 g/L");
  auto r = adv::validate_narrative(llm_narrative(text), a, 2);
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(has_kind(r, adv::ViolationKind::NumericLeak));

  text = kCleanReply;
  text.replace(text.find("87.3%"), 5, "87%");
  r = adv::validate_narrative(llm_narrative(text), a, 2);
  EXPECT_TRUE(has_kind(r, adv::ViolationKind::NumericLeak));
}

TEST(Validator, FlagsUnknownFeaturesAndEmptySections) {
  const auto a = fixture_assessment();
  std::string text = kCleanReply;
  text.replace(text.find("Creatinine is high"), 18, "Cystatin C is high");
  auto r = adv::validate_narrative(llm_narrative(text), a, 2);
  ASSERT_TRUE(has_kind(r, adv::ViolationKind::UnknownFeature));
  EXPECT_EQ(r.violations.front().detail, "cystatin c");

  text = kCleanReply;
  text.replace(text.find("Albumin is"), 10, "lab_07 is");
  EXPECT_TRUE(has_kind(adv::validate_narrative(llm_narrative(text), a, 2), adv::ViolationKind::UnknownFeature));

  auto empty = llm_narrative(kCleanReply);
  empty.advice.clear();
  r = adv::validate_narrative(empty, a, 2);
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(has_kind(r, adv::ViolationKind::EmptySection));
}

TEST(Fallback, DeterministicAndValid) {
  const auto a = fixture_assessment();
  for (std::size_t t = 0; t < a.n_visits(); ++t) {
    const auto n = adv::fallback_template(a, t, 3);
    EXPECT_EQ(n, adv::fallback_template(a, t, 3));
    EXPECT_EQ(n.source, adv::NarrativeSource::Fallback);
    const auto r = adv::validate_narrative(n, a, t);
    EXPECT_TRUE(r.passed) << r.to_json().dump();
    const auto parsed = adv::parse_sections(n.text);
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(parsed->risk_analysis, n.risk_analysis);
  }
  // Visits 1 and 2 are above the 0.4 threshold, visit 0 is not.
  EXPECT_EQ(adv::fallback_template(a, 0, 3).risk_analysis.find("elevated risk of"), std::string::npos);
  EXPECT_NE(adv::fallback_template(a, 2, 3).risk_analysis.find("elevated risk"), std::string::npos);
  EXPECT_NE(adv::fallback_template(a, 2, 3).key_features.find("Albumin: below the training average"),
            std::string::npos);
}

TEST(Fallback, ValidOnSchemaStyleNames) {
  auto a = fixture_assessment();
  a.channel_names = {"lab_00", "lab_01", "baseline_02", "age"};
  for (std::size_t t = 0; t < a.n_visits(); ++t) {
    EXPECT_TRUE(adv::validate_narrative(adv::fallback_template(a, t, 4), a, t).passed);
  }
}

namespace {

// Chat-completion stand-in on a random local port.
class MockLlm {
 public:
  explicit MockLlm(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockLlm() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  std::atomic<int> calls{0};
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::function<void(const httplib::Request&, httplib::Response&)> reply_with(std::string content) {
  return [content](const httplib::Request&, httplib::Response& res) {
    const nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
    res.set_content(body.dump(), "application/json");
  };
}

adv::ClientConfig config_for(const MockLlm& mock) {
  adv::ClientConfig c;
  c.endpoint = mock.endpoint();
  c.api_key = "test-key";
  c.model = "mock-model";
  c.timeout_seconds = 5;
  return c;
}

}  // namespace

TEST(Client, HappyPathParsesThreeSections) {
  MockLlm mock(reply_with(kCleanReply));
  adv::HttpChatClient client(config_for(mock));
  const auto a = fixture_assessment();
  const auto out = adv::advise(adv::mortality_task_definition(), a, 2, &client, 3);
  EXPECT_EQ(out.narrative.source, adv::NarrativeSource::Llm);
  EXPECT_EQ(out.narrative.model, "mock-model");
  EXPECT_FALSE(out.narrative.risk_analysis.empty());
  ASSERT_TRUE(out.validation.has_value());
  EXPECT_TRUE(out.validation->passed);

  const auto sent = nlohmann::json::parse(mock.last_body);
  EXPECT_EQ(sent["model"], "mock-model");
  EXPECT_EQ(sent["messages"][0]["role"], "system");
  EXPECT_EQ(sent["messages"][1]["content"], adv::build_prompt(adv::mortality_task_definition(), a, 2, 3).user_text);
  EXPECT_EQ(mock.last_auth, "Bearer test-key");
}

TEST(Client, NumericLeakFallsBack) {
  std::string leaky = kCleanReply;
  leaky.replace(leaky.find("is low relative"), 15, "= 32 g/L");
  MockLlm mock(reply_with(leaky));
  adv::HttpChatClient client(config_for(mock));
  const auto a = fixture_assessment();
  const auto out = adv::advise("task", a, 2, &client);
  EXPECT_EQ(out.narrative.source, adv::NarrativeSource::Fallback);
  ASSERT_TRUE(out.validation.has_value());
  EXPECT_TRUE(has_kind(*out.validation, adv::ViolationKind::NumericLeak));
  EXPECT_TRUE(adv::validate_narrative(out.narrative, a, 2).passed);
}

TEST(Client, UpstreamFailuresDegradeToFallback) {
  const auto a = fixture_assessment();
  {
    MockLlm mock([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    adv::HttpChatClient client(config_for(mock));
    EXPECT_THROW(client.complete("s", "u"), adv::LlmStatusError);
    EXPECT_EQ(adv::advise("task", a, 1, &client).narrative.source, adv::NarrativeSource::Fallback);
  }
  {
    MockLlm mock([](const httplib::Request&, httplib::Response& res) { res.set_content("not json", "text/plain"); });
    adv::HttpChatClient client(config_for(mock));
    EXPECT_THROW(client.complete("s", "u"), adv::LlmResponseError);
  }
  {
    MockLlm mock(reply_with("no headings here"));
    adv::HttpChatClient client(config_for(mock));
    EXPECT_THROW(adv::request_advice(adv::build_prompt("t", a, 0), client), adv::LlmResponseError);
  }
  adv::ClientConfig dead;
  dead.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  dead.timeout_seconds = 1;
  adv::HttpChatClient client(dead);
  EXPECT_THROW(client.complete("s", "u"), adv::LlmNetworkError);
  const auto out = adv::advise("task", a, 0, &client);
  EXPECT_EQ(out.narrative.source, adv::NarrativeSource::Fallback);
  EXPECT_FALSE(out.validation.has_value());
}

TEST(Client, OfflineAlwaysFallsBack) {
  const auto a = fixture_assessment();
  const auto out = adv::advise("task", a, 2, nullptr);
  EXPECT_EQ(out.narrative.source, adv::NarrativeSource::Fallback);
  EXPECT_EQ(out.narrative.fallback_reason, "offline");
  EXPECT_THROW(adv::HttpChatClient(adv::ClientConfig{}), std::invalid_argument);
}

TEST(Client, ConfigFromEnvironment) {
  setenv("AICARE_LLM_ENDPOINT", "https://example.invalid/v1/chat/completions", 1);
  setenv("AICARE_LLM_MODEL", "m1", 1);
  setenv("AICARE_LLM_TIMEOUT", "12.5", 1);
  const auto c = adv::ClientConfig::from_env();
  EXPECT_FALSE(c.offline());
  EXPECT_EQ(c.model, "m1");
  EXPECT_EQ(c.timeout_seconds, 12.5);
  EXPECT_EQ(c.max_concurrent, 4u);
  unsetenv("AICARE_LLM_ENDPOINT");
  unsetenv("AICARE_LLM_MODEL");
  unsetenv("AICARE_LLM_TIMEOUT");
  EXPECT_TRUE(adv::ClientConfig::from_env().offline());
}

TEST(Client, ConcurrencyCapIsHonoured) {
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  MockLlm mock([&](const httplib::Request& req, httplib::Response& res) {
    const int now = ++in_flight;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    --in_flight;
    reply_with(kCleanReply)(req, res);
  });
  auto cfg = config_for(mock);
  cfg.max_concurrent = 2;
  adv::HttpChatClient client(cfg);
  std::vector<std::thread> workers;
  for (int i = 0; i < 6; ++i) workers.emplace_back([&] { client.complete("s", "u"); });
  for (auto& w : workers) w.join();
  EXPECT_EQ(mock.calls.load(), 6);
  EXPECT_LE(peak.load(), 2);
}
