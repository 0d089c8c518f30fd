#include "aicare/advisory/client.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace aicare::advisory {

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

// "https://host:port/a/b" -> ("https://host:port", "/a/b").
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("LLM endpoint must be an absolute URL: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }

 private:
  std::counting_semaphore<>& s_;
};

}  // namespace

ClientConfig ClientConfig::from_env() {
  ClientConfig c;
  c.endpoint = env_or("AICARE_LLM_ENDPOINT", "");
  c.api_key = env_or("AICARE_LLM_API_KEY", "");
  c.model = env_or("AICARE_LLM_MODEL", c.model);
  const auto timeout = env_or("AICARE_LLM_TIMEOUT", "");
  if (!timeout.empty()) {
    c.timeout_seconds = std::stod(timeout);
    if (!(c.timeout_seconds > 0)) throw std::invalid_argument("AICARE_LLM_TIMEOUT must be positive");
  }
  return c;
}

HttpChatClient::HttpChatClient(ClientConfig config) : config_(std::move(config)) {
  if (config_.offline()) throw std::invalid_argument("HttpChatClient needs an endpoint");
  if (config_.max_concurrent == 0) throw std::invalid_argument("max_concurrent must be positive");
  std::tie(base_, path_) = split_url(config_.endpoint);
  slots_ = std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(config_.max_concurrent));
}

std::string HttpChatClient::complete(const std::string& system_text, const std::string& user_text) {
  SlotGuard slot(*slots_);
  httplib::Client cli(base_);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const nlohmann::json body = {
      {"model", config_.model},
      {"messages", {{{"role", "system"}, {"content", system_text}}, {{"role", "user"}, {"content", user_text}}}}};
  const auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw LlmNetworkError("LLM request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) throw LlmStatusError(res->status, res->body);
  try {
    const auto doc = nlohmann::json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LlmResponseError(std::string("unparseable LLM response: ") + e.what());
  }
}

Narrative request_advice(const PromptPair& prompt, ChatClient& client) {
  const std::string reply = client.complete(prompt.system_text, prompt.user_text);
  const auto sections = parse_sections(reply);
  if (!sections) throw LlmResponseError("LLM reply lacks the three expected sections");
  Narrative n;
  n.text = reply;
  n.source = NarrativeSource::Llm;
  n.model = client.model_name();
  n.key_features = sections->key_features;
  n.risk_analysis = sections->risk_analysis;
  n.advice = sections->advice;
  return n;
}

AdviceOutcome advise(const std::string& task_definition, const model::RiskAssessment& assessment,
                     std::size_t visit, ChatClient* client, std::size_t top_k) {
  AdviceOutcome out;
  auto fallback = [&](std::string reason) {
    out.narrative = fallback_template(assessment, visit, std::min<std::size_t>(top_k, 5));
    out.narrative.fallback_reason = std::move(reason);
    return out;
  };
  if (client == nullptr) return fallback("offline");
  const auto prompt = build_prompt(task_definition, assessment, visit, top_k);
  Narrative reply;
  try {
    reply = request_advice(prompt, *client);
  } catch (const LlmError& e) {
    return fallback(e.what());
  }
  out.validation = validate_narrative(reply, assessment, visit);
  if (!out.validation->passed) {
    return fallback("reply failed validation: " + to_string(out.validation->violations.front().kind));
  }
  out.narrative = std::move(reply);
  return out;
}

}  // namespace aicare::advisory
