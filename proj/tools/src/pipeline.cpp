#include "aicare/cli/pipeline.hpp"

#include <cmath>
#include <fstream>

#include "aicare/analytics/calibration.hpp"
#include "aicare/ehr/cleaning.hpp"
#include "aicare/ehr/io.hpp"
#include "aicare/ehr/labeling.hpp"
#include "aicare/error.hpp"

#ifndef AICARE_VERSION
#define AICARE_VERSION "unknown"
#endif

namespace aicare::cli {

const char* version() { return AICARE_VERSION; }

nlohmann::json PreparedCohort::summary() const {
  std::size_t visits = 0;
  for (const auto& p : cohort.patients) visits += p.record.visits.size();
  return {{"n_patients", cohort.patients.size()},
          {"n_positive_patients", cohort.n_positive_patients()},
          {"n_visits", visits},
          {"n_included_visits", cohort.n_included_visits()},
          {"dropped_records", cohort.dropped_records},
          {"removed_features", removed_features},
          {"schema_hash", cohort.schema.hash()},
          {"warnings", cohort.warnings}};
}

PreparedCohort prepare_cohort(const RunConfig& config) {
  auto cohort = ehr::load_cohort(config.visits.string(), config.statics.string(), config.schema.string());
  if (config.aggregate_same_day) cohort = ehr::aggregate_same_day(cohort);
  auto pruned = ehr::prune_sparse_features(cohort, config.max_missing_rate);
  PreparedCohort out;
  out.removed_features = std::move(pruned.removed_features);
  out.cohort = config.task == Task::Preterm
                   ? ehr::assign_preterm_labels(pruned.cohort, config.preterm_week, config.window_days)
                   : ehr::assign_mortality_labels(pruned.cohort, config.horizon_days);
  return out;
}

FoldData fold_data(const ehr::LabeledCohort& cohort, const ehr::Fold& fold, std::uint64_t seed) {
  FoldData d;
  d.fold = fold;
  d.preprocessor = ehr::fit_preprocessor(cohort, fold.train, "fold-" + std::to_string(fold.index));
  const auto os = ehr::oversample_minority(cohort, fold.train, seed + fold.index);
  d.train = ehr::apply_preprocessor(cohort, os.indices, d.preprocessor);
  for (std::size_t i = 0; i < d.train.size(); ++i) d.train[i].duplicate = os.duplicate[i];
  d.validation = ehr::apply_preprocessor(cohort, fold.validation, d.preprocessor);
  d.test = ehr::apply_preprocessor(cohort, fold.test, d.preprocessor);
  return d;
}

nlohmann::json folds_json(const ehr::LabeledCohort& cohort, const std::vector<ehr::Fold>& folds) {
  auto ids = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(cohort.patients[i].record.patient_id);
    return out;
  };
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& f : folds) {
    doc.push_back({{"fold", f.index}, {"train", ids(f.train)}, {"validation", ids(f.validation)}, {"test", ids(f.test)}});
  }
  return doc;
}

model::Checkpoint with_calibration(model::Checkpoint checkpoint, const std::vector<ehr::PatientTensor>& validation,
                                   double beta) {
  const auto scores = model::labeled_scores(checkpoint.model, validation);
  checkpoint.calibration = analytics::calibrate(scores.logits, scores.labels, beta);
  return checkpoint;
}

analytics::MetricReport evaluate_checkpoint(const model::Checkpoint& checkpoint,
                                            const std::vector<ehr::PatientTensor>& patients, double beta) {
  const auto scores = model::labeled_scores(checkpoint.model, patients);
  const double temperature = checkpoint.calibration ? checkpoint.calibration->temperature : 1.0;
  const double threshold = checkpoint.calibration ? checkpoint.calibration->threshold : 0.5;
  if (checkpoint.calibration) beta = checkpoint.calibration->beta;
  std::vector<double> probs;
  probs.reserve(scores.logits.size());
  for (double z : scores.logits) probs.push_back(analytics::calibrated_probability(z, temperature));
  return analytics::confusion_metrics(probs, scores.labels, threshold, beta);
}

FoldOutcome run_fold(const RunConfig& config, const ehr::LabeledCohort& cohort, const ehr::Fold& fold, bool calibrate,
                     const model::ProgressFn& progress) {
  const auto data = fold_data(cohort, fold, config.seed);
  auto result = model::train(cohort.schema, config.hyper, data.train, data.validation, progress);
  FoldOutcome out;
  out.checkpoint = {std::move(result.model), data.preprocessor, std::nullopt};
  if (calibrate) out.checkpoint = with_calibration(std::move(out.checkpoint), data.validation, config.calibration_beta);
  out.history = std::move(result.history);
  out.warnings = std::move(result.warnings);
  out.test = evaluate_checkpoint(out.checkpoint, data.test, config.calibration_beta);
  return out;
}

std::filesystem::path fold_dir(const std::filesystem::path& output_dir, std::size_t fold) {
  return output_dir / ("fold-" + std::to_string(fold));
}

nlohmann::json summarize_folds(const std::filesystem::path& output_dir, std::size_t folds) {
  nlohmann::json per_fold = nlohmann::json::array();
  std::vector<double> aurocs;
  std::vector<double> auprcs;
  for (std::size_t i = 0; i < folds; ++i) {
    const auto path = fold_dir(output_dir, i) / "metrics.json";
    if (!std::filesystem::exists(path)) continue;
    const auto report = analytics::MetricReport::from_json(read_json(path));
    per_fold.push_back({{"fold", i}, {"auroc", report.auroc ? nlohmann::json(*report.auroc) : nlohmann::json()},
                        {"auprc", report.auprc ? nlohmann::json(*report.auprc) : nlohmann::json()}});
    if (report.auroc) aurocs.push_back(*report.auroc);
    if (report.auprc) auprcs.push_back(*report.auprc);
  }
  auto stats = [](const std::vector<double>& xs) -> nlohmann::json {
    if (xs.empty()) return nullptr;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return {{"mean", mean}, {"sd", sd}, {"n", xs.size()}};
  };
  return {{"folds", per_fold}, {"auroc", stats(aurocs)}, {"auprc", stats(auprcs)}};
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const std::string& config_hash,
                    std::uint64_t seed) {
  write_json(dir / "manifest.json", {{"tool", "aicare"},
                                     {"version", version()},
                                     {"command", command},
                                     {"config_hash", config_hash},
                                     {"seed", seed}});
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("not found: " + path.string());
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw DataError(path.string() + " is not valid JSON");
  return doc;
}

}  // namespace aicare::cli
