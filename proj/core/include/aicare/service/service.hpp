#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "aicare/advisory/client.hpp"
#include "aicare/model/assessment.hpp"
#include "aicare/model/checkpoint.hpp"
#include "aicare/service/store.hpp"

namespace aicare::service {

inline constexpr std::size_t kDefaultTopK = 10;
inline constexpr std::size_t kMaxTopK = 1000;
inline constexpr std::size_t kDefaultPopulationN = 100;
inline constexpr std::uint64_t kDefaultPopulationSeed = 42;

struct ServiceConfig {
  std::filesystem::path checkpoint;
  std::filesystem::path store;
  std::string host = "127.0.0.1";
  /// 0 binds an ephemeral port; see Server::port().
  int port = 8080;
  std::string cors_origin = "*";
  /// Offline unless an endpoint is set.
  advisory::ClientConfig llm;
};

/// Status plus JSON body; the body is already serialized so cached and fresh
/// responses can be compared byte for byte.
struct Response {
  int status = 200;
  std::string body;
};

/// Serialized assessment: per-visit risks, the full importance vector and the
/// top_k ranked features, in visit order.
nlohmann::json assessment_response(const model::RiskAssessment& assessment, std::size_t top_k,
                                   const std::string& model_hash);

/// Patient ids are 1..64 characters from [A-Za-z0-9_.-].
bool valid_patient_id(const std::string& id);

/// Route logic without the transport, so tests can call it directly. The
/// model, calibration and cohort are loaded once and never modified.
class Service {
 public:
  /// Throws Error naming both hashes when the checkpoint schema differs from
  /// the stored cohort schema. `llm` may be null (offline).
  Service(model::Checkpoint checkpoint, std::shared_ptr<Store> store, std::unique_ptr<advisory::ChatClient> llm);

  const std::string& model_hash() const { return model_hash_; }

  Response health() const;
  Response model_info() const;
  Response list_patients(std::size_t offset, std::size_t limit) const;
  Response patient(const std::string& id) const;
  /// `use_cache` false recomputes and leaves the cache untouched.
  Response assessment(const std::string& id, std::size_t top_k, bool use_cache = true) const;
  Response population(const std::string& feature, std::size_t n, std::uint64_t seed) const;
  /// `visit` empty means the latest visit.
  Response advice(const std::string& id, std::optional<std::size_t> visit) const;
  Response post_event(const std::string& body) const;
  Response list_events(const std::string& session_id) const;

 private:
  const ehr::LabeledPatient* find(const std::string& id) const;
  model::RiskAssessment assess(const ehr::LabeledPatient& patient) const;

  model::Checkpoint checkpoint_;
  std::string model_hash_;
  std::shared_ptr<Store> store_;
  ehr::LabeledCohort cohort_;
  std::string task_;
  std::unique_ptr<advisory::ChatClient> llm_;
};

/// HTTP transport over a Service. Requests run on httplib's worker pool.
class Server {
 public:
  Server(std::shared_ptr<Service> service, std::string cors_origin = "*");
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds; returns the bound port. Throws Error when binding fails.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  /// Stops accepting and waits for in-flight requests.
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

/// Loads checkpoint and store, checks hashes and builds the LLM client from
/// `config.llm` (offline when no endpoint).
std::shared_ptr<Service> open_service(const ServiceConfig& config);

}  // namespace aicare::service
