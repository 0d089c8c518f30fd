#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/ehr/preprocess.hpp"
#include "aicare/model/model.hpp"

namespace aicare::model {

/// One line of the training progress log.
struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  /// Empty when the validation split has no positive or no labeled visit.
  std::optional<double> val_auprc;

  nlohmann::json to_json() const;
};

using ProgressFn = std::function<void(const EpochRecord&)>;

struct TrainResult {
  /// Weights from the epoch with the best validation AUPRC (the last epoch
  /// when validation AUPRC is undefined throughout).
  Model model;
  std::vector<EpochRecord> history;
  std::vector<std::string> warnings;
};

/// Mini-batch Adam with global-norm clipping. The batch order is reshuffled
/// every epoch from a generator seeded with hyper.seed; batches without a
/// labeled visit are skipped. Stops after hyper.max_epochs or once
/// hyper.patience epochs pass without a validation improvement.
/// Throws DivergenceError, naming epoch and batch, on a non-finite loss.
TrainResult train(const ehr::FeatureSchema& schema, const ModelHyper& hyper,
                  std::span<const ehr::PatientTensor> train_set,
                  std::span<const ehr::PatientTensor> validation, const ProgressFn& progress = {});

/// Labeled per-visit logits and labels of `patients`, in patient then visit
/// order. Duplicated (oversampled) patients are skipped.
struct LabeledScores {
  std::vector<double> logits;
  std::vector<int> labels;
};
LabeledScores labeled_scores(const Model& model, std::span<const ehr::PatientTensor> patients);

}  // namespace aicare::model
