#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "aicare/advisory/narrative.hpp"
#include "aicare/advisory/prompt.hpp"
#include "aicare/error.hpp"

namespace aicare::advisory {

/// Read from AICARE_LLM_ENDPOINT, AICARE_LLM_API_KEY, AICARE_LLM_MODEL and
/// AICARE_LLM_TIMEOUT (seconds). An empty endpoint means offline.
struct ClientConfig {
  /// Full chat-completions URL, e.g. https://host/v1/chat/completions.
  std::string endpoint;
  std::string api_key;
  std::string model = "default";
  double timeout_seconds = 30.0;
  std::size_t max_concurrent = 4;

  bool offline() const { return endpoint.empty(); }
  static ClientConfig from_env();
};

/// Upstream LLM failures; never escape the serving path.
class LlmError : public Error {
 public:
  using Error::Error;
};
class LlmNetworkError : public LlmError {
 public:
  using LlmError::LlmError;
};
class LlmStatusError : public LlmError {
 public:
  LlmStatusError(int status, const std::string& body)
      : LlmError("LLM endpoint returned HTTP " + std::to_string(status) + ": " + body.substr(0, 200)),
        status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};
class LlmResponseError : public LlmError {
 public:
  using LlmError::LlmError;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the assistant message content.
  virtual std::string complete(const std::string& system_text, const std::string& user_text) = 0;
  virtual std::string model_name() const = 0;
};

/// Chat-completion client: POSTs {model, messages:[system, user]} and reads
/// choices[0].message.content. At most `max_concurrent` requests are in
/// flight at once.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(ClientConfig config);

  std::string complete(const std::string& system_text, const std::string& user_text) override;
  std::string model_name() const override { return config_.model; }

 private:
  ClientConfig config_;
  std::string base_;
  std::string path_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

/// Sends the prompt and parses the reply into sections. Throws LlmError
/// subclasses on transport, status or format failures.
Narrative request_advice(const PromptPair& prompt, ChatClient& client);

struct AdviceOutcome {
  Narrative narrative;
  /// Validation of the upstream reply; empty when no reply was obtained.
  std::optional<ValidationReport> validation;
};

/// build_prompt, request_advice and validate_narrative chained together.
/// With no client, on any LlmError, or when validation fails, the fallback
/// template is served instead; this function does not throw for those causes.
AdviceOutcome advise(const std::string& task_definition, const model::RiskAssessment& assessment,
                     std::size_t visit, ChatClient* client, std::size_t top_k = 10);

}  // namespace aicare::advisory
