#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numeric>
#include <thread>

#include "aicare/advisory/narrative.hpp"
#include "aicare/analytics/population.hpp"
#include "aicare/ehr/labeling.hpp"
#include "aicare/ehr/synthetic.hpp"
#include "aicare/error.hpp"
#include "aicare/model/assessment.hpp"
#include "aicare/model/checkpoint.hpp"
#include "aicare/service/service.hpp"
#include "aicare/service/store.hpp"

namespace ehr = aicare::ehr;
namespace m = aicare::model;
namespace an = aicare::analytics;
namespace adv = aicare::advisory;
namespace svc = aicare::service;
using nlohmann::json;

namespace {

std::uint64_t bits(double x) {
  std::uint64_t b = 0;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("aicare_service_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(counter_++) + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

struct World {
  ehr::LabeledCohort cohort;
  m::Checkpoint checkpoint;
};

const World& world() {
  static const World w = [] {
    ehr::SyntheticSpec spec;
    spec.n_patients = 60;
    spec.seed = 7;
    World out;
    out.cohort = ehr::assign_mortality_labels(ehr::generate_synthetic_cohort(spec), 365);
    std::vector<std::size_t> all(out.cohort.patients.size());
    std::iota(all.begin(), all.end(), 0);
    m::ModelHyper h;
    h.hidden_dim = 8;
    h.n_heads = 2;
    out.checkpoint.model = m::init_model(out.cohort.schema, h);
    out.checkpoint.preprocessor = ehr::fit_preprocessor(out.cohort, all, "all");
    an::CalibrationArtifact cal;
    cal.temperature = 1.3;
    cal.threshold = 0.4;
    out.checkpoint.calibration = cal;
    return out;
  }();
  return w;
}

std::shared_ptr<svc::Store> make_store(const std::filesystem::path& path) {
  auto store = std::make_shared<svc::Store>(path);
  store->import_cohort(world().cohort, "mortality");
  return store;
}

std::shared_ptr<svc::Service> make_service(const TempDir& dir, std::unique_ptr<adv::ChatClient> llm = nullptr) {
  return std::make_shared<svc::Service>(world().checkpoint, make_store(dir / "store.db"), std::move(llm));
}

// Service plus HTTP transport on an ephemeral port.
class LiveServer {
 public:
  explicit LiveServer(std::shared_ptr<svc::Service> service, std::string cors = "*")
      : service_(std::move(service)), server_(service_, std::move(cors)) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.run(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 200 && !client_->Get("/api/health"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client& client() { return *client_; }
  svc::Service& service() { return *service_; }

 private:
  std::shared_ptr<svc::Service> service_;
  svc::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

class MockLlm {
 public:
  explicit MockLlm(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++calls;
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
  std::unique_ptr<adv::ChatClient> client() const {
    adv::ClientConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.model = "mock-model";
    c.timeout_seconds = 5;
    return std::make_unique<adv::HttpChatClient>(c);
  }
  std::atomic<int> calls{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::function<void(const httplib::Request&, httplib::Response&)> reply_with(std::string content) {
  return [content](const httplib::Request&, httplib::Response& res) {
    const json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
    res.set_content(body.dump(), "application/json");
  };
}

m::RiskAssessment library_assessment(const ehr::LabeledPatient& p) {
  const auto& ck = world().checkpoint;
  return m::predict_trajectory(ck.model, ck.preprocessor, p.record, &*ck.calibration);
}

}  // namespace

// ---- store ----

TEST(Store, CohortRoundTripsExactly) {
  TempDir dir;
  {
    auto store = make_store(dir / "s.db");
    EXPECT_EQ(store->task(), "mortality");
  }
  svc::Store reopened(dir / "s.db");
  const auto back = reopened.load_cohort();
  EXPECT_EQ(back.schema, world().cohort.schema);
  EXPECT_EQ(back.patients, world().cohort.patients);
  EXPECT_EQ(back.dropped_records, world().cohort.dropped_records);
  EXPECT_EQ(reopened.schema_hash(), world().cohort.schema.hash());
}

TEST(Store, EmptyStoreHasNoCohort) {
  TempDir dir;
  svc::Store store(dir / "empty.db");
  EXPECT_EQ(store.schema_hash(), "");
  EXPECT_THROW(store.load_cohort(), aicare::DataError);
}

TEST(Store, ReimportClearsCaches) {
  TempDir dir;
  auto store = make_store(dir / "s.db");
  store->cache_assessment("P1", "h", 3, "{}");
  store->cache_population("lab_00", 10, 1, "h", "{}");
  ASSERT_TRUE(store->cached_assessment("P1", "h", 3));
  EXPECT_FALSE(store->cached_assessment("P1", "h", 4));
  EXPECT_FALSE(store->cached_assessment("P1", "other", 3));
  store->import_cohort(world().cohort, "mortality");
  EXPECT_FALSE(store->cached_assessment("P1", "h", 3));
  EXPECT_FALSE(store->cached_population("lab_00", 10, 1, "h"));
}

TEST(Store, EventTimestampsMonotonePerSession) {
  TempDir dir;
  svc::Store store(dir / "e.db");
  store.record_event({0, "a", 10.0, svc::EventKind::CurveHover, json::object()});
  store.record_event({0, "a", 10.0, svc::EventKind::CurveHover, json::object()});
  store.record_event({0, "b", 1.0, svc::EventKind::ListPaging, json::object()});
  EXPECT_THROW(store.record_event({0, "a", 9.5, svc::EventKind::CrossView, json::object()}), aicare::DataError);
  EXPECT_EQ(store.events("a").size(), 2u);
  EXPECT_EQ(store.events().size(), 3u);
}

TEST(Store, EventKindParsingIsClosed) {
  for (const char* k : {"list_paging", "curve_hover", "cross_view", "feature_select"}) {
    const auto parsed = svc::parse_event_kind(k);
    ASSERT_TRUE(parsed) << k;
    EXPECT_EQ(svc::to_string(*parsed), k);
  }
  EXPECT_FALSE(svc::parse_event_kind("scroll"));
  EXPECT_FALSE(svc::parse_event_kind("Curve_Hover"));
}

// ---- service construction ----

TEST(Service, SchemaMismatchNamesBothHashes) {
  TempDir dir;
  auto store = make_store(dir / "s.db");
  auto ck = world().checkpoint;
  const auto other = world().cohort.schema.without({"lab_05"});
  auto h = world().checkpoint.model.hyper;
  h.dynamic_dim = 0;
  h.static_dim = 0;
  ck.model = m::init_model(other, h);
  ck.preprocessor = {};
  try {
    svc::Service s(ck, store, nullptr);
    FAIL() << "expected a schema mismatch";
  } catch (const aicare::Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find(other.hash()), std::string::npos) << what;
    EXPECT_NE(what.find(world().cohort.schema.hash()), std::string::npos) << what;
  }
}

TEST(Service, OpenServiceLoadsFiles) {
  TempDir dir;
  m::save_checkpoint(dir / "model.ckpt", world().checkpoint);
  make_store(dir / "store.db");
  svc::ServiceConfig cfg;
  cfg.checkpoint = dir / "model.ckpt";
  cfg.store = dir / "store.db";
  const auto s = svc::open_service(cfg);
  EXPECT_EQ(s->model_hash(), m::checkpoint_hash(world().checkpoint));
  cfg.store = dir / "missing.db";
  EXPECT_THROW(svc::open_service(cfg), aicare::NotFoundError);
}

TEST(Service, PatientIdValidation) {
  EXPECT_TRUE(svc::valid_patient_id("P0001"));
  EXPECT_TRUE(svc::valid_patient_id("a-b_c.d"));
  EXPECT_FALSE(svc::valid_patient_id(""));
  EXPECT_FALSE(svc::valid_patient_id("has space"));
  EXPECT_FALSE(svc::valid_patient_id("semi;colon"));
  EXPECT_FALSE(svc::valid_patient_id(std::string(65, 'x')));
}

// ---- routes over HTTP ----

TEST(Routes, HealthReportsModelHash) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto res = live.client().Get("/api/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body["status"], "ok");
  EXPECT_EQ(body["model_hash"], m::checkpoint_hash(world().checkpoint));
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST(Routes, CorsOriginIsConfigurable) {
  TempDir dir;
  LiveServer live(make_service(dir), "http://localhost:5173");
  const auto res = live.client().Options("/api/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
}

TEST(Routes, ModelInfoAndPatientList) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto info = json::parse(live.client().Get("/api/model/info")->body);
  EXPECT_EQ(info["task"], "mortality");
  EXPECT_EQ(info["schema_hash"], world().cohort.schema.hash());
  EXPECT_EQ(info["calibration"]["temperature"], 1.3);
  EXPECT_EQ(info["channels"].size(), world().cohort.schema.n_channels());

  const auto list = json::parse(live.client().Get("/api/patients")->body);
  ASSERT_EQ(list["total"], world().cohort.patients.size());
  ASSERT_EQ(list["patients"].size(), world().cohort.patients.size());
  EXPECT_EQ(list["patients"][0]["patient_id"], world().cohort.patients[0].record.patient_id);

  const auto page = json::parse(live.client().Get("/api/patients?offset=10&limit=5")->body);
  ASSERT_EQ(page["patients"].size(), 5u);
  EXPECT_EQ(page["patients"][0]["patient_id"], world().cohort.patients[10].record.patient_id);
  EXPECT_EQ(live.client().Get("/api/patients?limit=-1")->status, 422);
}

TEST(Routes, PatientRecordRoundTrips) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto& p = world().cohort.patients[3];
  const auto res = live.client().Get("/api/patients/" + p.record.patient_id);
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(svc::record_from_json(json::parse(res->body)), p.record);
}

TEST(Routes, AssessmentBitEqualToLibraryForTwentyPatients) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto& patients = world().cohort.patients;
  ASSERT_GE(patients.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& p = patients[i];
    const auto res = live.client().Get("/api/patients/" + p.record.patient_id + "/assessment");
    ASSERT_EQ(res->status, 200) << res->body;
    const auto body = json::parse(res->body);
    const auto lib = library_assessment(p);
    ASSERT_EQ(body["visits"].size(), lib.n_visits());
    EXPECT_EQ(body["patient_id"], lib.patient_id);
    EXPECT_EQ(bits(body["threshold"].get<double>()), bits(*lib.threshold));
    for (std::size_t v = 0; v < lib.n_visits(); ++v) {
      const auto& bv = body["visits"][v];
      EXPECT_EQ(bits(bv["time"].get<double>()), bits(lib.times[v]));
      EXPECT_EQ(bits(bv["logit"].get<double>()), bits(lib.logits[v]));
      EXPECT_EQ(bits(bv["raw_risk"].get<double>()), bits(lib.raw_risks[v]));
      EXPECT_EQ(bits(bv["calibrated_risk"].get<double>()), bits(lib.calibrated_risks[v]));
      const auto imp = lib.importance_at(v);
      ASSERT_EQ(bv["importance"].size(), imp.size());
      double sum = 0.0;
      for (std::size_t c = 0; c < imp.size(); ++c) {
        EXPECT_EQ(bits(bv["importance"][c].get<double>()), bits(imp[c]));
        sum += imp[c];
      }
      EXPECT_NEAR(sum, 1.0, 1e-6);
      const auto ranked = m::rank_features(lib, v, svc::kDefaultTopK);
      ASSERT_EQ(bv["top_features"].size(), ranked.size());
      for (std::size_t k = 0; k < ranked.size(); ++k) {
        const auto& f = bv["top_features"][k];
        EXPECT_EQ(f["name"], ranked[k].name);
        EXPECT_EQ(bits(f["value"].get<double>()), bits(ranked[k].value));
        EXPECT_EQ(bits(f["importance"].get<double>()), bits(ranked[k].importance));
        EXPECT_EQ(f["imputed"], ranked[k].imputed);
      }
    }
    for (std::size_t v = 1; v < lib.n_visits(); ++v) {
      EXPECT_LT(body["visits"][v - 1]["time"].get<double>(), body["visits"][v]["time"].get<double>());
    }
  }
}

TEST(Routes, TopKLimitsFeaturesPerVisit) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto id = world().cohort.patients[0].record.patient_id;
  const auto body = json::parse(live.client().Get("/api/patients/" + id + "/assessment?top_k=3")->body);
  EXPECT_EQ(body["top_k"], 3);
  for (const auto& v : body["visits"]) EXPECT_EQ(v["top_features"].size(), 3u);
}

TEST(Routes, AssessmentErrors) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto id = world().cohort.patients[0].record.patient_id;
  auto unknown = live.client().Get("/api/patients/NOPE999/assessment");
  EXPECT_EQ(unknown->status, 404);
  EXPECT_EQ(json::parse(unknown->body)["patient_id"], "NOPE999");
  EXPECT_EQ(live.client().Get("/api/patients/bad%3Bid/assessment")->status, 422);
  EXPECT_EQ(live.client().Get("/api/patients/" + id + "/assessment?top_k=0")->status, 422);
  EXPECT_EQ(live.client().Get("/api/patients/" + id + "/assessment?top_k=abc")->status, 422);
  EXPECT_EQ(live.client().Get("/api/patients/" + id + "/assessment?top_k=1001")->status, 422);
  EXPECT_EQ(live.client().Get("/api/patients/NOPE999")->status, 404);
  EXPECT_EQ(live.client().Get("/api/nothing/here")->status, 404);
}

TEST(Routes, CachedAndFreshAssessmentsAreByteIdentical) {
  TempDir dir;
  auto store = make_store(dir / "store.db");
  auto service = std::make_shared<svc::Service>(world().checkpoint, store, nullptr);
  LiveServer live(service);
  const auto id = world().cohort.patients[5].record.patient_id;
  const auto path = "/api/patients/" + id + "/assessment?top_k=4";
  ASSERT_FALSE(store->cached_assessment(id, service->model_hash(), 4));
  const auto first = live.client().Get(path)->body;
  const auto cached = store->cached_assessment(id, service->model_hash(), 4);
  ASSERT_TRUE(cached);
  EXPECT_EQ(*cached, first);
  EXPECT_EQ(live.client().Get(path)->body, first);
  EXPECT_EQ(live.client().Get(path + "&nocache=1")->body, first);
}

TEST(Routes, ConcurrentIdenticalRequestsAgree) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto id = world().cohort.patients[2].record.patient_id;
  const auto port = live.client().port();
  std::vector<std::string> bodies(6);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      const auto res = c.Get("/api/patients/" + id + "/assessment?nocache=" + std::to_string(i % 2));
      if (res) bodies[i] = res->body;
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& b : bodies) EXPECT_EQ(b, bodies[0]);
  EXPECT_FALSE(bodies[0].empty());
}

TEST(Routes, PopulationSummary) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto res = live.client().Get("/api/population/lab_00?n=100&seed=3");
  ASSERT_EQ(res->status, 200) << res->body;
  const auto body = json::parse(res->body);
  // Fewer patients than requested: the whole cohort is used.
  EXPECT_EQ(body["sample_size"], world().cohort.patients.size());
  EXPECT_EQ(body["value"].size(), body["importance"].size());
  EXPECT_EQ(body["value"].size(), body["risk"].size());

  const auto& ck = world().checkpoint;
  const auto lib = an::population_aggregate(ck.model, ck.preprocessor, world().cohort, "lab_00", 100, 3,
                                            &*ck.calibration);
  EXPECT_EQ(res->body, lib.to_json().dump());

  EXPECT_EQ(live.client().Get("/api/population/lab_00?n=100&seed=3")->body, res->body);
  const auto small = json::parse(live.client().Get("/api/population/lab_00?n=10&seed=3")->body);
  EXPECT_EQ(small["sample_size"], 10);

  const auto unknown = live.client().Get("/api/population/not_a_feature");
  EXPECT_EQ(unknown->status, 404);
  EXPECT_NE(unknown->body.find("not_a_feature"), std::string::npos);
  EXPECT_EQ(live.client().Get("/api/population/lab_00?n=0")->status, 422);
}

TEST(Routes, AdviceOfflineServesFallback) {
  TempDir dir;
  LiveServer live(make_service(dir));
  const auto& p = world().cohort.patients[0];
  const auto res = live.client().Post("/api/patients/" + p.record.patient_id + "/advice?visit=0", "", "application/json");
  ASSERT_EQ(res->status, 200);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body["source"], "fallback");
  EXPECT_EQ(body["visit"], 0);
  EXPECT_TRUE(body["validation"].is_null());

  const auto latest = json::parse(
      live.client().Post("/api/patients/" + p.record.patient_id + "/advice", "", "application/json")->body);
  EXPECT_EQ(latest["visit"], p.record.visits.size() - 1);

  EXPECT_EQ(live.client().Post("/api/patients/" + p.record.patient_id + "/advice?visit=999", "", "application/json")
                ->status,
            404);
  EXPECT_EQ(live.client().Post("/api/patients/NOPE999/advice", "", "application/json")->status, 404);
}

TEST(Routes, AdviceFailingUpstreamNeverFiveHundred) {
  MockLlm mock([](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("overloaded", "text/plain");
  });
  TempDir dir;
  LiveServer live(make_service(dir, mock.client()));
  const auto& p = world().cohort.patients[1];
  for (std::size_t v = 0; v < p.record.visits.size(); ++v) {
    const auto res =
        live.client().Post("/api/patients/" + p.record.patient_id + "/advice?visit=" + std::to_string(v), "",
                           "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    const auto body = json::parse(res->body);
    EXPECT_EQ(body["source"], "fallback");
    EXPECT_NE(body["fallback_reason"].get<std::string>().find("503"), std::string::npos);
    adv::Narrative n;
    n.text = body["text"];
    n.key_features = body["sections"]["key_feature_identification"];
    n.risk_analysis = body["sections"]["risk_analysis"];
    n.advice = body["sections"]["personalized_advice"];
    EXPECT_TRUE(adv::validate_narrative(n, library_assessment(p), v).passed);
  }
  EXPECT_GT(mock.calls.load(), 0);
}

TEST(Routes, AdviceUnreachableUpstreamFallsBack) {
  adv::ClientConfig c;
  c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  c.timeout_seconds = 1;
  TempDir dir;
  LiveServer live(make_service(dir, std::make_unique<adv::HttpChatClient>(c)));
  const auto res = live.client().Post(
      "/api/patients/" + world().cohort.patients[0].record.patient_id + "/advice", "", "application/json");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["source"], "fallback");
}

TEST(Routes, AdviceFromUpstreamWhenValid) {
  const auto& p = world().cohort.patients[0];
  const std::size_t visit = 0;
  // A reply the validator accepts: the fallback text itself.
  const auto clean = adv::fallback_template(library_assessment(p), visit).text;
  MockLlm mock(reply_with(clean));
  TempDir dir;
  LiveServer live(make_service(dir, mock.client()));
  const auto body = json::parse(
      live.client().Post("/api/patients/" + p.record.patient_id + "/advice?visit=0", "", "application/json")->body);
  EXPECT_EQ(body["source"], "llm");
  EXPECT_EQ(body["model"], "mock-model");
  EXPECT_TRUE(body["validation"]["passed"]);
  EXPECT_FALSE(body["sections"]["risk_analysis"].get<std::string>().empty());
}

TEST(Routes, AdviceNumericLeakRejected) {
  const auto& p = world().cohort.patients[0];
  const auto clean = adv::fallback_template(library_assessment(p), 0).text;
  const auto at = clean.find("Risk Analysis");
  ASSERT_NE(at, std::string::npos);
  auto leaky = clean;
  leaky.insert(clean.find('\n', at) + 1, "The creatinine value is 612 today.\n");
  MockLlm mock(reply_with(leaky));
  TempDir dir;
  LiveServer live(make_service(dir, mock.client()));
  const auto body = json::parse(
      live.client().Post("/api/patients/" + p.record.patient_id + "/advice?visit=0", "", "application/json")->body);
  EXPECT_EQ(body["source"], "fallback");
  EXPECT_FALSE(body["validation"]["passed"]);
}

TEST(Routes, EventsCountAndReplayInOrder) {
  TempDir dir;
  LiveServer live(make_service(dir));
  auto post = [&](const json& e) { return live.client().Post("/api/events", e.dump(), "application/json"); };
  for (double ts : {100.0, 250.0, 400.0}) {
    const auto res = post({{"session_id", "s1"}, {"timestamp", ts}, {"kind", "curve_hover"}, {"payload", {{"visit", 1}}}});
    ASSERT_EQ(res->status, 201) << res->body;
  }
  ASSERT_EQ(post({{"session_id", "s1"}, {"timestamp", 400.0}, {"kind", "cross_view"}})->status, 201);
  ASSERT_EQ(post({{"session_id", "s2"}, {"timestamp", 5.0}, {"kind", "list_paging"}})->status, 201);

  const auto scroll = post({{"session_id", "s1"}, {"timestamp", 500.0}, {"kind", "scroll"}});
  EXPECT_EQ(scroll->status, 422);
  EXPECT_NE(scroll->body.find("scroll"), std::string::npos);
  EXPECT_EQ(post({{"session_id", "s1"}, {"timestamp", 399.0}, {"kind", "curve_hover"}})->status, 422);
  EXPECT_EQ(post({{"session_id", "s1"}, {"kind", "curve_hover"}})->status, 422);
  EXPECT_EQ(post({{"timestamp", 1.0}, {"kind", "curve_hover"}})->status, 422);
  EXPECT_EQ(live.client().Post("/api/events", "not json", "application/json")->status, 422);

  const auto s1 = json::parse(live.client().Get("/api/events?session_id=s1")->body);
  EXPECT_EQ(s1["counts"]["curve_hover"], 3);
  EXPECT_EQ(s1["counts"]["cross_view"], 1);
  ASSERT_EQ(s1["events"].size(), 4u);
  for (std::size_t i = 1; i < s1["events"].size(); ++i) {
    EXPECT_LE(s1["events"][i - 1]["timestamp"].get<double>(), s1["events"][i]["timestamp"].get<double>());
  }
  EXPECT_EQ(s1["events"][0]["payload"]["visit"], 1);
  const auto all = json::parse(live.client().Get("/api/events")->body);
  EXPECT_EQ(all["events"].size(), 5u);
}

TEST(Routes, EndpointsDoNotMutateModelOrCohort) {
  TempDir dir;
  auto store = make_store(dir / "store.db");
  auto service = std::make_shared<svc::Service>(world().checkpoint, store, nullptr);
  LiveServer live(service);
  const auto hash = service->model_hash();
  const auto id = world().cohort.patients[4].record.patient_id;
  const auto before = live.client().Get("/api/patients/" + id)->body;
  live.client().Get("/api/patients/" + id + "/assessment");
  live.client().Get("/api/population/lab_01");
  live.client().Post("/api/patients/" + id + "/advice", "", "application/json");
  live.client().Post("/api/events", json{{"session_id", "x"}, {"timestamp", 1}, {"kind", "feature_select"}}.dump(),
                     "application/json");
  EXPECT_EQ(live.client().Get("/api/patients/" + id)->body, before);
  EXPECT_EQ(json::parse(live.client().Get("/api/health")->body)["model_hash"], hash);
  EXPECT_EQ(store->load_cohort().patients, world().cohort.patients);
}
