#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/ehr/cohort.hpp"

struct sqlite3;

namespace aicare::service {

/// Interaction kinds the dashboard may report.
enum class EventKind { ListPaging, CurveHover, CrossView, FeatureSelect };
std::string to_string(EventKind kind);
/// Empty for anything outside the closed set.
std::optional<EventKind> parse_event_kind(const std::string& text);

struct EventRecord {
  std::int64_t id = 0;
  std::string session_id;
  /// Milliseconds since the Unix epoch, as sent by the client.
  double timestamp = 0.0;
  EventKind kind = EventKind::CurveHover;
  nlohmann::json payload;

  nlohmann::json to_json() const;
};

/// Single-file SQLite store. Tables:
///   meta(key PRIMARY KEY, value)            task, schema JSON and hash
///   patients(ord, patient_id UNIQUE, record, labels, positive)
///   assessment_cache(patient_id, model_hash, top_k, body)
///   population_cache(feature, n, seed, model_hash, body)
///   events(id, session_id, ts, kind, payload)
/// Records are stored as JSON; numbers round-trip exactly.
///
/// All access goes through one connection guarded by a mutex, so writes are
/// serialized.
class Store {
 public:
  explicit Store(const std::filesystem::path& path);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// Replaces the stored cohort and clears both caches.
  void import_cohort(const ehr::LabeledCohort& cohort, const std::string& task);
  ehr::LabeledCohort load_cohort() const;
  std::string task() const;
  /// Empty when no cohort has been imported.
  std::string schema_hash() const;

  std::optional<std::string> cached_assessment(const std::string& patient_id, const std::string& model_hash,
                                               std::size_t top_k) const;
  void cache_assessment(const std::string& patient_id, const std::string& model_hash, std::size_t top_k,
                        const std::string& body);
  std::optional<std::string> cached_population(const std::string& feature, std::size_t n, std::uint64_t seed,
                                               const std::string& model_hash) const;
  void cache_population(const std::string& feature, std::size_t n, std::uint64_t seed,
                        const std::string& model_hash, const std::string& body);

  /// Appends an event. Throws DataError when the timestamp is earlier than
  /// the session's latest event. Returns the row id.
  std::int64_t record_event(const EventRecord& event);
  /// Events of one session (all sessions when empty), ordered by timestamp then id.
  std::vector<EventRecord> events(const std::string& session_id = "") const;
  std::map<std::string, std::size_t> event_counts(const std::string& session_id) const;

 private:
  void exec(const char* sql) const;

  sqlite3* db_ = nullptr;
  mutable std::mutex mutex_;
};

nlohmann::json record_to_json(const ehr::PatientRecord& record);
ehr::PatientRecord record_from_json(const nlohmann::json& doc);

}  // namespace aicare::service
