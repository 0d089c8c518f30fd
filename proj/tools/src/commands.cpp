#include "aicare/cli/commands.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI/CLI.hpp>

#include "aicare/analytics/population.hpp"
#include "aicare/cli/config.hpp"
#include "aicare/cli/pipeline.hpp"
#include "aicare/ehr/io.hpp"
#include "aicare/ehr/splits.hpp"
#include "aicare/ehr/synthetic.hpp"
#include "aicare/error.hpp"
#include "aicare/hash.hpp"
#include "aicare/model/checkpoint.hpp"
#include "aicare/service/service.hpp"
#include "aicare/service/store.hpp"

namespace aicare::cli {

namespace {

namespace fs = std::filesystem;

struct GenSynthArgs {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> patients;
  std::string spec;
};

struct ConfigArgs {
  std::string config;
  std::vector<std::size_t> folds;
  bool with_calibration = false;
  bool quiet = false;
  std::string store;
};

struct EvaluateArgs {
  std::string config;
  std::size_t fold = 0;
  std::string split = "test";
  std::string checkpoint;
  std::string out;
};

struct PopstatsArgs {
  std::string checkpoint;
  std::string store;
  std::string feature;
  std::size_t n = service::kDefaultPopulationN;
  std::uint64_t seed = service::kDefaultPopulationSeed;
  std::string format = "json";
  std::string out;
};

struct ServeArgs {
  std::string checkpoint;
  std::string store;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
};

RunConfig load_config(const std::string& path) {
  auto config = RunConfig::load(path);
  config.validate();
  return config;
}

/// Requested folds, or all of them; each checked against the fold count.
std::vector<std::size_t> selected_folds(const std::vector<std::size_t>& requested, std::size_t k) {
  std::vector<std::size_t> out = requested;
  if (out.empty()) {
    for (std::size_t i = 0; i < k; ++i) out.push_back(i);
  }
  for (auto f : out) {
    if (f >= k) throw Error("fold " + std::to_string(f) + " out of range (folds = " + std::to_string(k) + ")");
  }
  return out;
}

int gen_synth(const GenSynthArgs& a, std::ostream& out) {
  ehr::SyntheticSpec spec;
  if (!a.spec.empty()) spec = ehr::SyntheticSpec::from_json(read_json(a.spec));
  if (a.seed) spec.seed = *a.seed;
  if (a.patients) spec.n_patients = *a.patients;
  spec.validate();
  const auto cohort = ehr::generate_synthetic_cohort(spec);
  const fs::path dir = a.out;
  fs::create_directories(dir);
  ehr::write_cohort(cohort, (dir / "visits.csv").string(), (dir / "static.csv").string(),
                    (dir / "schema.json").string());
  write_json(dir / "synth_spec.json", spec.to_json());
  write_manifest(dir, "gen-synth", sha256_hex(spec.to_json().dump()), spec.seed);
  out << "wrote " << cohort.patients.size() << " patients, " << cohort.n_visits() << " visits to " << dir.string()
      << '\n';
  return kExitOk;
}

int preprocess(const ConfigArgs& a, std::ostream& out) {
  const auto config = load_config(a.config);
  const auto prepared = prepare_cohort(config);
  const auto folds = ehr::split_stratified_kfold(prepared.cohort, config.folds, config.seed);
  const auto& dir = config.output_dir;
  write_json(dir / "cohort.json", prepared.summary());
  write_json(dir / "folds.json", folds_json(prepared.cohort, folds));
  for (const auto& f : folds) {
    const auto pre = ehr::fit_preprocessor(prepared.cohort, f.train, "fold-" + std::to_string(f.index));
    write_json(fold_dir(dir, f.index) / "preprocessor.json", pre.to_json());
  }
  const fs::path store_path = a.store.empty() ? dir / "store.db" : fs::path(a.store);
  fs::remove(store_path);
  service::Store(store_path).import_cohort(prepared.cohort, to_string(config.task));
  write_manifest(dir, "preprocess", config.hash(), config.seed);
  out << prepared.summary().dump(2) << '\n';
  return kExitOk;
}

void write_fold(const fs::path& dir, const FoldOutcome& r) {
  fs::create_directories(dir);
  model::save_checkpoint(dir / "model.ckpt", r.checkpoint);
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : r.history) history.push_back(e.to_json());
  write_json(dir / "history.json", {{"epochs", history}, {"warnings", r.warnings}});
  write_json(dir / "metrics.json", r.test.to_json());
  if (r.checkpoint.calibration) write_json(dir / "calibration.json", r.checkpoint.calibration->to_json());
}

int train(const ConfigArgs& a, std::ostream& out, std::ostream& err) {
  const auto config = load_config(a.config);
  const auto prepared = prepare_cohort(config);
  const auto folds = ehr::split_stratified_kfold(prepared.cohort, config.folds, config.seed);
  const auto& dir = config.output_dir;
  write_json(dir / "folds.json", folds_json(prepared.cohort, folds));
  for (auto i : selected_folds(a.folds, folds.size())) {
    model::ProgressFn progress;
    if (!a.quiet) {
      progress = [&err, i](const model::EpochRecord& e) { err << "fold " << i << ' ' << e.to_json().dump() << '\n'; };
    }
    const auto r = run_fold(config, prepared.cohort, folds[i], a.with_calibration, progress);
    write_fold(fold_dir(dir, i), r);
    out << "fold " << i << ": " << r.test.to_json().dump() << '\n';
  }
  write_json(dir / "summary.json", summarize_folds(dir, config.folds));
  write_manifest(dir, a.with_calibration ? "train --with-calibration" : "train", config.hash(), config.seed);
  return kExitOk;
}

int calibrate(const ConfigArgs& a, std::ostream& out) {
  const auto config = load_config(a.config);
  const auto prepared = prepare_cohort(config);
  const auto folds = ehr::split_stratified_kfold(prepared.cohort, config.folds, config.seed);
  const auto& dir = config.output_dir;
  for (auto i : selected_folds(a.folds, folds.size())) {
    const auto fdir = fold_dir(dir, i);
    auto ckpt = model::load_checkpoint(fdir / "model.ckpt");
    const auto validation = ehr::apply_preprocessor(prepared.cohort, folds[i].validation, ckpt.preprocessor);
    const auto test = ehr::apply_preprocessor(prepared.cohort, folds[i].test, ckpt.preprocessor);
    ckpt = with_calibration(std::move(ckpt), validation, config.calibration_beta);
    model::save_checkpoint(fdir / "model.ckpt", ckpt);
    write_json(fdir / "calibration.json", ckpt.calibration->to_json());
    write_json(fdir / "metrics.json", evaluate_checkpoint(ckpt, test, config.calibration_beta).to_json());
    out << "fold " << i << ": T=" << ckpt.calibration->temperature << " threshold=" << ckpt.calibration->threshold
        << '\n';
  }
  write_json(dir / "summary.json", summarize_folds(dir, config.folds));
  write_manifest(dir, "calibrate", config.hash(), config.seed);
  return kExitOk;
}

int evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto config = load_config(a.config);
  const auto prepared = prepare_cohort(config);
  const auto folds = ehr::split_stratified_kfold(prepared.cohort, config.folds, config.seed);
  const auto i = selected_folds({a.fold}, folds.size()).front();
  const fs::path ckpt_path = a.checkpoint.empty() ? fold_dir(config.output_dir, i) / "model.ckpt" : fs::path(a.checkpoint);
  const auto ckpt = model::load_checkpoint(ckpt_path);
  const auto& f = folds[i];
  const auto& idx = a.split == "train" ? f.train : a.split == "validation" ? f.validation : f.test;
  const auto patients = ehr::apply_preprocessor(prepared.cohort, idx, ckpt.preprocessor);
  const auto report = evaluate_checkpoint(ckpt, patients, config.calibration_beta).to_json();
  if (!a.out.empty()) write_json(a.out, report);
  out << report.dump(2) << '\n';
  return kExitOk;
}

int popstats(const PopstatsArgs& a, std::ostream& out) {
  const auto ckpt = model::load_checkpoint(a.checkpoint);
  if (!fs::exists(a.store)) throw NotFoundError("store not found: " + a.store);
  const auto cohort = service::Store(a.store).load_cohort();
  if (cohort.schema.hash() != ckpt.model.schema.hash()) {
    throw Error("schema hash mismatch: checkpoint " + ckpt.model.schema.hash() + ", store " + cohort.schema.hash());
  }
  const auto* cal = ckpt.calibration ? &*ckpt.calibration : nullptr;
  const auto summary =
      analytics::population_aggregate(ckpt.model, ckpt.preprocessor, cohort, a.feature, a.n, a.seed, cal);
  const std::string text = a.format == "csv" ? summary.to_csv() : summary.to_json().dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    std::ofstream file(a.out, std::ios::binary);
    if (!(file << text)) throw Error("cannot write " + a.out);
  }
  return kExitOk;
}

int serve(const ServeArgs& a, std::ostream& out) {
  service::ServiceConfig cfg;
  cfg.checkpoint = a.checkpoint;
  cfg.store = a.store;
  cfg.host = a.host;
  cfg.port = a.port;
  cfg.cors_origin = a.cors_origin;
  cfg.llm = advisory::ClientConfig::from_env();
  auto service = service::open_service(cfg);

  // SIGINT/SIGTERM are taken by a waiter thread so stop() runs outside a
  // signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::Server server(service, cfg.cors_origin);
  const int port = server.bind(cfg.host, cfg.port);
  out << "serving model " << service->model_hash() << " on http://" << cfg.host << ':' << port
      << (cfg.llm.offline() ? " (advisory offline)" : "") << std::endl;
  std::thread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // run() also returns when the listener fails; wake the waiter either way.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk prediction and advisory toolkit for longitudinal EHR cohorts", "aicare"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  GenSynthArgs gs;
  auto* gen = app.add_subcommand("gen-synth", "Generate a planted-hazard synthetic cohort");
  gen->add_option("--out", gs.out, "Output directory")->required();
  gen->add_option("--seed", gs.seed, "Generator seed (default 42)");
  gen->add_option("--patients", gs.patients, "Number of patients (default 500)");
  gen->add_option("--spec", gs.spec, "Generator spec JSON; --seed and --patients override it")->check(CLI::ExistingFile);

  ConfigArgs pp;
  auto* pre = app.add_subcommand("preprocess", "Clean, label and split a cohort; import it into a store");
  pre->add_option("--config", pp.config, "Run config JSON")->required();
  pre->add_option("--store", pp.store, "Store path (default <output_dir>/store.db)");

  ConfigArgs tr;
  auto* trn = app.add_subcommand("train", "Cross-validated training");
  trn->add_option("--config", tr.config, "Run config JSON")->required();
  trn->add_option("--fold", tr.folds, "Train only these folds (repeatable)");
  trn->add_flag("--with-calibration", tr.with_calibration, "Calibrate each fold on its validation split");
  trn->add_flag("--quiet", tr.quiet, "No per-epoch progress on stderr");

  ConfigArgs ca;
  auto* cal = app.add_subcommand("calibrate", "Fit temperature and threshold for trained folds");
  cal->add_option("--config", ca.config, "Run config JSON")->required();
  cal->add_option("--fold", ca.folds, "Calibrate only these folds (repeatable)");

  EvaluateArgs ev;
  auto* eva = app.add_subcommand("evaluate", "Metrics of a fold checkpoint on one split");
  eva->add_option("--config", ev.config, "Run config JSON")->required();
  eva->add_option("--fold", ev.fold, "Fold index")->required();
  eva->add_option("--split", ev.split, "train, validation or test")
      ->check(CLI::IsMember({"train", "validation", "test"}));
  eva->add_option("--checkpoint", ev.checkpoint, "Checkpoint (default <output_dir>/fold-<i>/model.ckpt)");
  eva->add_option("--out", ev.out, "Also write the report here");

  PopstatsArgs ps;
  auto* pop = app.add_subcommand("popstats", "Population (value, importance, risk) triples for one feature");
  pop->add_option("--checkpoint", ps.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  pop->add_option("--store", ps.store, "Cohort store")->required();
  pop->add_option("--feature", ps.feature, "Feature name")->required();
  pop->add_option("--n", ps.n, "Sample size")->check(CLI::PositiveNumber);
  pop->add_option("--seed", ps.seed, "Sampling seed");
  pop->add_option("--format", ps.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  pop->add_option("--out", ps.out, "Output file (default stdout)");

  ServeArgs sv;
  auto* srv = app.add_subcommand("serve", "REST API over a checkpoint and a cohort store");
  srv->add_option("--checkpoint", sv.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  srv->add_option("--store", sv.store, "Cohort store")->required();
  srv->add_option("--host", sv.host, "Bind address");
  srv->add_option("--port", sv.port, "Port; 0 picks a free one")->check(CLI::Range(0, 65535));
  srv->add_option("--cors-origin", sv.cors_origin, "Allowed CORS origin");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return gen_synth(gs, out);
    if (pre->parsed()) return preprocess(pp, out);
    if (trn->parsed()) return train(tr, out, err);
    if (cal->parsed()) return calibrate(ca, out);
    if (eva->parsed()) return evaluate(ev, out);
    if (pop->parsed()) return popstats(ps, out);
    if (srv->parsed()) return serve(sv, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace aicare::cli
