#include "aicare/service/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include <httplib.h>

#include "aicare/advisory/prompt.hpp"
#include "aicare/analytics/population.hpp"
#include "aicare/error.hpp"

namespace aicare::service {

namespace {

Response json_response(int status, const nlohmann::json& body) { return {status, body.dump()}; }

Response error_response(int status, const std::string& message, nlohmann::json extra = nlohmann::json::object()) {
  extra["error"] = message;
  return json_response(status, extra);
}

std::string task_definition(const std::string& task) {
  return task == "preterm" ? advisory::preterm_task_definition() : advisory::mortality_task_definition();
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

bool valid_patient_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
}

nlohmann::json assessment_response(const model::RiskAssessment& a, std::size_t top_k, const std::string& model_hash) {
  nlohmann::json visits = nlohmann::json::array();
  for (std::size_t v = 0; v < a.n_visits(); ++v) {
    nlohmann::json top = nlohmann::json::array();
    for (const auto& f : model::rank_features(a, v, top_k)) {
      top.push_back({{"name", f.name},
                     {"value", f.value},
                     {"unit", f.unit},
                     {"importance", f.importance},
                     {"imputed", f.imputed}});
    }
    const auto imp = a.importance_at(v);
    visits.push_back({{"index", v},
                      {"time", a.times[v]},
                      {"logit", a.logits[v]},
                      {"raw_risk", a.raw_risks[v]},
                      {"calibrated_risk", a.calibrated_risks[v]},
                      {"importance", std::vector<double>(imp.begin(), imp.end())},
                      {"top_features", std::move(top)}});
  }
  return {{"patient_id", a.patient_id},
          {"model_hash", model_hash},
          {"channels", a.channel_names},
          {"units", a.channel_units},
          {"threshold", optional_json(a.threshold)},
          {"temperature", optional_json(a.temperature)},
          {"top_k", top_k},
          {"visits", std::move(visits)}};
}

Service::Service(model::Checkpoint checkpoint, std::shared_ptr<Store> store,
                 std::unique_ptr<advisory::ChatClient> llm)
    : checkpoint_(std::move(checkpoint)), store_(std::move(store)), llm_(std::move(llm)) {
  const auto model_schema = checkpoint_.model.schema.hash();
  const auto store_schema = store_->schema_hash();
  if (model_schema != store_schema) {
    throw Error("schema hash mismatch: checkpoint " + model_schema + ", store " +
                (store_schema.empty() ? std::string("<empty>") : store_schema));
  }
  model_hash_ = model::checkpoint_hash(checkpoint_);
  cohort_ = store_->load_cohort();
  task_ = store_->task();
}

const ehr::LabeledPatient* Service::find(const std::string& id) const { return cohort_.find(id); }

model::RiskAssessment Service::assess(const ehr::LabeledPatient& patient) const {
  const auto* cal = checkpoint_.calibration ? &*checkpoint_.calibration : nullptr;
  return model::predict_trajectory(checkpoint_.model, checkpoint_.preprocessor, patient.record, cal);
}

Response Service::health() const { return json_response(200, {{"status", "ok"}, {"model_hash", model_hash_}}); }

Response Service::model_info() const {
  const auto& m = checkpoint_.model;
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t c = 0; c < m.schema.n_channels(); ++c) features.push_back(m.schema.channel(c).name);
  return json_response(200, {{"model_hash", model_hash_},
                             {"task", task_},
                             {"schema_hash", m.schema.hash()},
                             {"schema", m.schema.to_json()},
                             {"channels", features},
                             {"hyper", m.hyper.to_json()},
                             {"training", m.meta.to_json()},
                             {"calibration", checkpoint_.calibration ? checkpoint_.calibration->to_json()
                                                                     : nlohmann::json()},
                             {"n_patients", cohort_.patients.size()}});
}

Response Service::list_patients(std::size_t offset, std::size_t limit) const {
  nlohmann::json items = nlohmann::json::array();
  const auto& ps = cohort_.patients;
  for (std::size_t i = std::min(offset, ps.size()); i < ps.size() && items.size() < limit; ++i) {
    const auto& r = ps[i].record;
    items.push_back({{"patient_id", r.patient_id},
                     {"n_visits", r.visits.size()},
                     {"first_time", r.visits.empty() ? nlohmann::json() : nlohmann::json(r.visits.front().time)},
                     {"last_time", r.visits.empty() ? nlohmann::json() : nlohmann::json(r.visits.back().time)},
                     {"positive", ps[i].positive}});
  }
  return json_response(200, {{"total", ps.size()}, {"offset", offset}, {"limit", limit}, {"patients", items}});
}

Response Service::patient(const std::string& id) const {
  if (!valid_patient_id(id)) return error_response(422, "malformed patient id");
  const auto* p = find(id);
  if (!p) return error_response(404, "unknown patient: " + id, {{"patient_id", id}});
  std::vector<std::string> labels;
  for (auto l : p->labels) {
    labels.push_back(l == ehr::VisitLabel::Positive ? "positive"
                     : l == ehr::VisitLabel::Negative ? "negative"
                                                      : "excluded");
  }
  auto body = record_to_json(p->record);
  body["labels"] = labels;
  body["positive"] = p->positive;
  return json_response(200, body);
}

Response Service::assessment(const std::string& id, std::size_t top_k, bool use_cache) const {
  if (!valid_patient_id(id)) return error_response(422, "malformed patient id");
  if (top_k == 0 || top_k > kMaxTopK) return error_response(422, "top_k must be in [1, 1000]");
  const auto* p = find(id);
  if (!p) return error_response(404, "unknown patient: " + id, {{"patient_id", id}});
  if (use_cache) {
    if (auto hit = store_->cached_assessment(id, model_hash_, top_k)) return {200, *hit};
  }
  auto body = assessment_response(assess(*p), top_k, model_hash_).dump();
  if (use_cache) store_->cache_assessment(id, model_hash_, top_k, body);
  return {200, std::move(body)};
}

Response Service::population(const std::string& feature, std::size_t n, std::uint64_t seed) const {
  if (n == 0) return error_response(422, "n must be positive");
  if (!checkpoint_.model.schema.channel_index(feature)) {
    return error_response(404, "unknown feature: " + feature, {{"feature", feature}});
  }
  if (auto hit = store_->cached_population(feature, n, seed, model_hash_)) return {200, *hit};
  const auto* cal = checkpoint_.calibration ? &*checkpoint_.calibration : nullptr;
  auto summary = analytics::population_aggregate(checkpoint_.model, checkpoint_.preprocessor, cohort_, feature, n,
                                                 seed, cal);
  auto body = summary.to_json().dump();
  store_->cache_population(feature, n, seed, model_hash_, body);
  return {200, std::move(body)};
}

Response Service::advice(const std::string& id, std::optional<std::size_t> visit) const {
  if (!valid_patient_id(id)) return error_response(422, "malformed patient id");
  const auto* p = find(id);
  if (!p) return error_response(404, "unknown patient: " + id, {{"patient_id", id}});
  const auto n_visits = p->record.visits.size();
  const std::size_t v = visit.value_or(n_visits == 0 ? 0 : n_visits - 1);
  if (v >= n_visits) return error_response(404, "unknown visit: " + std::to_string(v), {{"visit", v}});
  const auto a = assess(*p);
  const auto outcome = advisory::advise(task_definition(task_), a, v, llm_.get());
  nlohmann::json body = outcome.narrative.to_json();
  body["patient_id"] = id;
  body["visit"] = v;
  body["risk"] = a.calibrated_risks[v];
  body["validation"] = outcome.validation ? outcome.validation->to_json() : nlohmann::json();
  return json_response(200, body);
}

Response Service::post_event(const std::string& raw) const {
  const auto doc = nlohmann::json::parse(raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return error_response(422, "event body must be a JSON object");
  const auto session = doc.find("session_id");
  const auto ts = doc.find("timestamp");
  const auto kind = doc.find("kind");
  if (session == doc.end() || !session->is_string() || session->get<std::string>().empty()) {
    return error_response(422, "session_id must be a non-empty string");
  }
  if (ts == doc.end() || !ts->is_number() || !std::isfinite(ts->get<double>())) {
    return error_response(422, "timestamp must be a finite number");
  }
  if (kind == doc.end() || !kind->is_string()) return error_response(422, "kind must be a string");
  const auto parsed = parse_event_kind(kind->get<std::string>());
  if (!parsed) return error_response(422, "unknown event kind: " + kind->get<std::string>());
  EventRecord e;
  e.session_id = session->get<std::string>();
  e.timestamp = ts->get<double>();
  e.kind = *parsed;
  e.payload = doc.value("payload", nlohmann::json::object());
  try {
    e.id = store_->record_event(e);
  } catch (const DataError& err) {
    return error_response(422, err.what());
  }
  return json_response(201, {{"id", e.id}});
}

Response Service::list_events(const std::string& session_id) const {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : store_->events(session_id)) events.push_back(e.to_json());
  nlohmann::json body = {{"events", events}};
  if (!session_id.empty()) body["counts"] = store_->event_counts(session_id);
  return json_response(200, body);
}

// ---- transport ----

namespace {

/// Unsigned decimal, or empty for anything else.
std::optional<std::uint64_t> parse_uint(const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

struct Server::Impl {
  std::shared_ptr<Service> service;
  std::string cors_origin;
  httplib::Server http;
  bool bound = false;
};

Server::Server(std::shared_ptr<Service> service, std::string cors_origin) : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  impl_->cors_origin = std::move(cors_origin);
  auto& http = impl_->http;
  const auto svc = impl_->service;

  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  auto bad_param = [send](httplib::Response& res, const std::string& name) {
    send(res, {422, nlohmann::json{{"error", name + " must be a non-negative integer"}}.dump()});
  };
  // Reads an optional unsigned query parameter; false when present but malformed.
  auto uint_param = [](const httplib::Request& req, const char* name, std::uint64_t& out) {
    if (!req.has_param(name)) return true;
    const auto v = parse_uint(req.get_param_value(name));
    if (!v) return false;
    out = *v;
    return true;
  };

  http.set_default_headers({{"Access-Control-Allow-Origin", impl_->cors_origin},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.Get("/api/health", [svc, send](const httplib::Request&, httplib::Response& res) { send(res, svc->health()); });
  http.Get("/api/model/info",
           [svc, send](const httplib::Request&, httplib::Response& res) { send(res, svc->model_info()); });
  http.Get("/api/patients", [svc, send, bad_param, uint_param](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t offset = 0;
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
    if (!uint_param(req, "offset", offset)) return bad_param(res, "offset");
    if (!uint_param(req, "limit", limit)) return bad_param(res, "limit");
    send(res, svc->list_patients(offset, limit));
  });
  http.Get(R"(/api/patients/([^/]+))", [svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->patient(req.matches[1]));
  });
  http.Get(R"(/api/patients/([^/]+)/assessment)",
           [svc, send, bad_param, uint_param](const httplib::Request& req, httplib::Response& res) {
             std::uint64_t top_k = kDefaultTopK;
             if (!uint_param(req, "top_k", top_k)) return bad_param(res, "top_k");
             const bool use_cache = req.get_param_value("nocache") != "1";
             send(res, svc->assessment(req.matches[1], top_k, use_cache));
           });
  http.Get(R"(/api/population/([^/]+))",
           [svc, send, bad_param, uint_param](const httplib::Request& req, httplib::Response& res) {
             std::uint64_t n = kDefaultPopulationN;
             std::uint64_t seed = kDefaultPopulationSeed;
             if (!uint_param(req, "n", n)) return bad_param(res, "n");
             if (!uint_param(req, "seed", seed)) return bad_param(res, "seed");
             send(res, svc->population(req.matches[1], n, seed));
           });
  http.Post(R"(/api/patients/([^/]+)/advice)",
            [svc, send, bad_param](const httplib::Request& req, httplib::Response& res) {
              std::optional<std::size_t> visit;
              if (req.has_param("visit")) {
                const auto v = parse_uint(req.get_param_value("visit"));
                if (!v) return bad_param(res, "visit");
                visit = *v;
              }
              send(res, svc->advice(req.matches[1], visit));
            });
  http.Post("/api/events",
            [svc, send](const httplib::Request& req, httplib::Response& res) { send(res, svc->post_event(req.body)); });
  http.Get("/api/events", [svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->list_events(req.get_param_value("session_id")));
  });

  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(nlohmann::json{{"error", what}}.dump(), "application/json");
  });
  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) res.set_content(nlohmann::json{{"error", "not found"}}.dump(), "application/json");
  });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  auto& http = impl_->http;
  if (port == 0) {
    port_ = http.bind_to_any_port(host);
    if (port_ < 0) throw Error("cannot bind " + host);
  } else {
    if (!http.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    port_ = port;
  }
  impl_->bound = true;
  return port_;
}

void Server::run() {
  if (!impl_->bound) throw Error("server is not bound");
  impl_->http.listen_after_bind();
}

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

std::shared_ptr<Service> open_service(const ServiceConfig& config) {
  auto checkpoint = model::load_checkpoint(config.checkpoint);
  if (!std::filesystem::exists(config.store)) throw NotFoundError("store not found: " + config.store.string());
  auto store = std::make_shared<Store>(config.store);
  std::unique_ptr<advisory::ChatClient> llm;
  if (!config.llm.offline()) llm = std::make_unique<advisory::HttpChatClient>(config.llm);
  return std::make_shared<Service>(std::move(checkpoint), std::move(store), std::move(llm));
}

}  // namespace aicare::service
