#include "aicare/service/store.hpp"

#include <sqlite3.h>

#include "aicare/error.hpp"

namespace aicare::service {

namespace {

// Prepared statement bound positionally; finalized on scope exit.
class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(std::string("store: ") + sqlite3_errmsg(db));
    }
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& bind(int i, const std::string& s) {
    check(sqlite3_bind_text(stmt_, i, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Stmt& bind(int i, std::int64_t v) {
    check(sqlite3_bind_int64(stmt_, i, v));
    return *this;
  }
  Stmt& bind(int i, double v) {
    check(sqlite3_bind_double(stmt_, i, v));
    return *this;
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(std::string("store: ") + sqlite3_errmsg(db_));
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
  double real(int col) const { return sqlite3_column_double(stmt_, col); }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) throw Error(std::string("store: ") + sqlite3_errmsg(db_));
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

nlohmann::json value_json(const ehr::Value& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

ehr::Value value_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string meta_value(sqlite3* db, const char* key) {
  Stmt s(db, "SELECT value FROM meta WHERE key = ?");
  s.bind(1, std::string(key));
  return s.step() ? s.text(0) : std::string();
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ListPaging: return "list_paging";
    case EventKind::CurveHover: return "curve_hover";
    case EventKind::CrossView: return "cross_view";
    case EventKind::FeatureSelect: return "feature_select";
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(const std::string& text) {
  for (auto k : {EventKind::ListPaging, EventKind::CurveHover, EventKind::CrossView, EventKind::FeatureSelect}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

nlohmann::json EventRecord::to_json() const {
  return {{"id", id}, {"session_id", session_id}, {"timestamp", timestamp}, {"kind", to_string(kind)},
          {"payload", payload}};
}

nlohmann::json record_to_json(const ehr::PatientRecord& r) {
  nlohmann::json statics = nlohmann::json::array();
  for (const auto& v : r.static_values) statics.push_back(value_json(v));
  nlohmann::json visits = nlohmann::json::array();
  for (const auto& v : r.visits) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& x : v.values) values.push_back(value_json(x));
    visits.push_back({{"time", v.time}, {"values", values}, {"same_day_duplicate", v.same_day_duplicate}});
  }
  return {{"patient_id", r.patient_id},
          {"static_values", statics},
          {"visits", visits},
          {"outcome", {{"event", r.outcome.event}, {"time", value_json(r.outcome.time)}}}};
}

ehr::PatientRecord record_from_json(const nlohmann::json& doc) {
  ehr::PatientRecord r;
  r.patient_id = doc.at("patient_id").get<std::string>();
  for (const auto& v : doc.at("static_values")) r.static_values.push_back(value_from(v));
  for (const auto& v : doc.at("visits")) {
    ehr::Visit visit;
    visit.time = v.at("time").get<double>();
    for (const auto& x : v.at("values")) visit.values.push_back(value_from(x));
    visit.same_day_duplicate = v.value("same_day_duplicate", false);
    r.visits.push_back(std::move(visit));
  }
  r.outcome.event = doc.at("outcome").at("event").get<bool>();
  r.outcome.time = value_from(doc.at("outcome").at("time"));
  return r;
}

Store::Store(const std::filesystem::path& path) {
  if (sqlite3_open_v2(path.string().c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error("cannot open store " + path.string() + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  exec("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);"
       "CREATE TABLE IF NOT EXISTS patients (ord INTEGER PRIMARY KEY, patient_id TEXT UNIQUE NOT NULL,"
       "  record TEXT NOT NULL, labels TEXT NOT NULL, positive INTEGER NOT NULL);"
       "CREATE TABLE IF NOT EXISTS assessment_cache (patient_id TEXT, model_hash TEXT, top_k INTEGER,"
       "  body TEXT NOT NULL, PRIMARY KEY (patient_id, model_hash, top_k));"
       "CREATE TABLE IF NOT EXISTS population_cache (feature TEXT, n INTEGER, seed INTEGER, model_hash TEXT,"
       "  body TEXT NOT NULL, PRIMARY KEY (feature, n, seed, model_hash));"
       "CREATE TABLE IF NOT EXISTS events (id INTEGER PRIMARY KEY AUTOINCREMENT, session_id TEXT NOT NULL,"
       "  ts REAL NOT NULL, kind TEXT NOT NULL, payload TEXT NOT NULL);"
       "CREATE INDEX IF NOT EXISTS events_session ON events (session_id, ts);");
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(const char* sql) const {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    const std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw Error("store: " + msg);
  }
}

void Store::import_cohort(const ehr::LabeledCohort& cohort, const std::string& task) {
  std::lock_guard lock(mutex_);
  exec("BEGIN");
  try {
    exec("DELETE FROM patients; DELETE FROM assessment_cache; DELETE FROM population_cache;");
    auto put_meta = [&](const std::string& key, const std::string& value) {
      Stmt s(db_, "INSERT OR REPLACE INTO meta (key, value) VALUES (?, ?)");
      s.bind(1, key).bind(2, value).step();
    };
    put_meta("task", task);
    put_meta("schema", cohort.schema.to_json().dump());
    put_meta("schema_hash", cohort.schema.hash());
    put_meta("dropped_records", std::to_string(cohort.dropped_records));
    put_meta("warnings", nlohmann::json(cohort.warnings).dump());
    std::int64_t ord = 0;
    for (const auto& p : cohort.patients) {
      std::vector<int> labels;
      for (auto l : p.labels) labels.push_back(static_cast<int>(l));
      Stmt s(db_, "INSERT INTO patients (ord, patient_id, record, labels, positive) VALUES (?, ?, ?, ?, ?)");
      s.bind(1, ord++)
          .bind(2, p.record.patient_id)
          .bind(3, record_to_json(p.record).dump())
          .bind(4, nlohmann::json(labels).dump())
          .bind(5, std::int64_t{p.positive ? 1 : 0})
          .step();
    }
    exec("COMMIT");
  } catch (...) {
    exec("ROLLBACK");
    throw;
  }
}

ehr::LabeledCohort Store::load_cohort() const {
  std::lock_guard lock(mutex_);
  const auto schema = meta_value(db_, "schema");
  if (schema.empty()) throw DataError("store holds no cohort");
  ehr::LabeledCohort c;
  c.schema = ehr::FeatureSchema::from_json(nlohmann::json::parse(schema));
  c.dropped_records = std::stoull(meta_value(db_, "dropped_records"));
  c.warnings = nlohmann::json::parse(meta_value(db_, "warnings")).get<std::vector<std::string>>();
  Stmt s(db_, "SELECT record, labels, positive FROM patients ORDER BY ord");
  while (s.step()) {
    ehr::LabeledPatient p;
    p.record = record_from_json(nlohmann::json::parse(s.text(0)));
    for (int l : nlohmann::json::parse(s.text(1)).get<std::vector<int>>()) {
      p.labels.push_back(static_cast<ehr::VisitLabel>(l));
    }
    p.positive = s.integer(2) != 0;
    c.patients.push_back(std::move(p));
  }
  return c;
}

std::string Store::task() const {
  std::lock_guard lock(mutex_);
  return meta_value(db_, "task");
}

std::string Store::schema_hash() const {
  std::lock_guard lock(mutex_);
  return meta_value(db_, "schema_hash");
}

std::optional<std::string> Store::cached_assessment(const std::string& patient_id, const std::string& model_hash,
                                                    std::size_t top_k) const {
  std::lock_guard lock(mutex_);
  Stmt s(db_, "SELECT body FROM assessment_cache WHERE patient_id = ? AND model_hash = ? AND top_k = ?");
  s.bind(1, patient_id).bind(2, model_hash).bind(3, static_cast<std::int64_t>(top_k));
  if (!s.step()) return std::nullopt;
  return s.text(0);
}

void Store::cache_assessment(const std::string& patient_id, const std::string& model_hash, std::size_t top_k,
                             const std::string& body) {
  std::lock_guard lock(mutex_);
  Stmt s(db_, "INSERT OR REPLACE INTO assessment_cache (patient_id, model_hash, top_k, body) VALUES (?, ?, ?, ?)");
  s.bind(1, patient_id).bind(2, model_hash).bind(3, static_cast<std::int64_t>(top_k)).bind(4, body).step();
}

std::optional<std::string> Store::cached_population(const std::string& feature, std::size_t n, std::uint64_t seed,
                                                    const std::string& model_hash) const {
  std::lock_guard lock(mutex_);
  Stmt s(db_, "SELECT body FROM population_cache WHERE feature = ? AND n = ? AND seed = ? AND model_hash = ?");
  s.bind(1, feature).bind(2, static_cast<std::int64_t>(n)).bind(3, static_cast<std::int64_t>(seed)).bind(4, model_hash);
  if (!s.step()) return std::nullopt;
  return s.text(0);
}

void Store::cache_population(const std::string& feature, std::size_t n, std::uint64_t seed,
                             const std::string& model_hash, const std::string& body) {
  std::lock_guard lock(mutex_);
  Stmt s(db_, "INSERT OR REPLACE INTO population_cache (feature, n, seed, model_hash, body) VALUES (?, ?, ?, ?, ?)");
  s.bind(1, feature)
      .bind(2, static_cast<std::int64_t>(n))
      .bind(3, static_cast<std::int64_t>(seed))
      .bind(4, model_hash)
      .bind(5, body)
      .step();
}

std::int64_t Store::record_event(const EventRecord& event) {
  std::lock_guard lock(mutex_);
  {
    Stmt last(db_, "SELECT MAX(ts) FROM events WHERE session_id = ?");
    last.bind(1, event.session_id);
    if (last.step() && !last.text(0).empty() && event.timestamp < last.real(0)) {
      throw DataError("event timestamp precedes the latest event of session " + event.session_id);
    }
  }
  Stmt s(db_, "INSERT INTO events (session_id, ts, kind, payload) VALUES (?, ?, ?, ?)");
  s.bind(1, event.session_id).bind(2, event.timestamp).bind(3, to_string(event.kind)).bind(4, event.payload.dump());
  s.step();
  return sqlite3_last_insert_rowid(db_);
}

std::vector<EventRecord> Store::events(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  Stmt s(db_, session_id.empty()
                  ? "SELECT id, session_id, ts, kind, payload FROM events ORDER BY ts, id"
                  : "SELECT id, session_id, ts, kind, payload FROM events WHERE session_id = ? ORDER BY ts, id");
  if (!session_id.empty()) s.bind(1, session_id);
  std::vector<EventRecord> out;
  while (s.step()) {
    EventRecord e;
    e.id = s.integer(0);
    e.session_id = s.text(1);
    e.timestamp = s.real(2);
    e.kind = *parse_event_kind(s.text(3));
    e.payload = nlohmann::json::parse(s.text(4));
    out.push_back(std::move(e));
  }
  return out;
}

std::map<std::string, std::size_t> Store::event_counts(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  Stmt s(db_, "SELECT kind, COUNT(*) FROM events WHERE session_id = ? GROUP BY kind ORDER BY kind");
  s.bind(1, session_id);
  std::map<std::string, std::size_t> out;
  while (s.step()) out[s.text(0)] = static_cast<std::size_t>(s.integer(1));
  return out;
}

}  // namespace aicare::service
