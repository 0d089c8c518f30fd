#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/analytics/metrics.hpp"
#include "aicare/cli/config.hpp"
#include "aicare/ehr/cohort.hpp"
#include "aicare/ehr/preprocess.hpp"
#include "aicare/ehr/splits.hpp"
#include "aicare/model/checkpoint.hpp"
#include "aicare/model/train.hpp"

namespace aicare::cli {

struct PreparedCohort {
  ehr::LabeledCohort cohort;
  std::vector<std::string> removed_features;

  nlohmann::json summary() const;
};

/// load, optional same-day aggregation, sparse-feature pruning, labeling.
PreparedCohort prepare_cohort(const RunConfig& config);

/// Preprocessed splits of one fold. The preprocessor is fitted on the
/// training part only; the training set is oversampled with seed + fold.
struct FoldData {
  ehr::Fold fold;
  ehr::Preprocessor preprocessor;
  std::vector<ehr::PatientTensor> train;
  std::vector<ehr::PatientTensor> validation;
  std::vector<ehr::PatientTensor> test;
};

FoldData fold_data(const ehr::LabeledCohort& cohort, const ehr::Fold& fold, std::uint64_t seed);

/// Fold memberships by patient id.
nlohmann::json folds_json(const ehr::LabeledCohort& cohort, const std::vector<ehr::Fold>& folds);

/// Fits temperature and threshold on the validation split and attaches them.
model::Checkpoint with_calibration(model::Checkpoint checkpoint, const std::vector<ehr::PatientTensor>& validation,
                                   double beta);

/// Metrics over labeled, non-duplicate visits. Scores are calibrated
/// probabilities at the calibrated threshold when the checkpoint carries a
/// calibration, raw probabilities at 0.5 otherwise.
analytics::MetricReport evaluate_checkpoint(const model::Checkpoint& checkpoint,
                                            const std::vector<ehr::PatientTensor>& patients, double beta = 1.0);

struct FoldOutcome {
  model::Checkpoint checkpoint;
  std::vector<model::EpochRecord> history;
  std::vector<std::string> warnings;
  /// Test-split metrics of `checkpoint`.
  analytics::MetricReport test;
};

/// Trains one fold with config.hyper and evaluates it on the test part.
FoldOutcome run_fold(const RunConfig& config, const ehr::LabeledCohort& cohort, const ehr::Fold& fold,
                     bool calibrate, const model::ProgressFn& progress = {});

std::filesystem::path fold_dir(const std::filesystem::path& output_dir, std::size_t fold);

/// Mean and sample standard deviation of test AUROC/AUPRC over the folds
/// whose fold-{i}/metrics.json exists.
nlohmann::json summarize_folds(const std::filesystem::path& output_dir, std::size_t folds);

/// {tool, version, command, config_hash, seed}; no timestamps, so reruns
/// produce identical bytes.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const std::string& config_hash,
                    std::uint64_t seed);

/// Pretty-printed JSON plus a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

const char* version();

}  // namespace aicare::cli
