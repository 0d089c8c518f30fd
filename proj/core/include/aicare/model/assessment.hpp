#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/analytics/calibration.hpp"
#include "aicare/ehr/cohort.hpp"
#include "aicare/ehr/preprocess.hpp"
#include "aicare/model/model.hpp"

namespace aicare::model {

/// Per-visit model output for one patient. Channel order is the schema's
/// channel order: dynamic features, then static ones. Matrices are
/// row-major [visit][channel].
struct RiskAssessment {
  std::string patient_id;
  std::vector<std::string> channel_names;
  std::vector<std::string> channel_units;
  std::vector<double> times;
  std::vector<double> logits;
  std::vector<double> raw_risks;
  /// sigmoid(logit / T); equals raw_risks without calibration.
  std::vector<double> calibrated_risks;
  std::vector<double> importance;
  /// Values in original units after imputation.
  std::vector<double> values;
  /// Z-scores under the training statistics; the sign gives the direction
  /// relative to the training mean.
  std::vector<double> z_scores;
  std::vector<std::uint8_t> observed;
  std::optional<double> temperature;
  std::optional<double> threshold;

  std::size_t n_visits() const { return times.size(); }
  std::size_t n_channels() const { return channel_names.size(); }
  std::span<const double> importance_at(std::size_t visit) const;
  std::span<const double> values_at(std::size_t visit) const;

  nlohmann::json to_json() const;
  bool operator==(const RiskAssessment&) const = default;
};

/// Preprocesses `record` with `pre`, runs the model and attaches the
/// calibration when given. Throws DataError when the record or the
/// preprocessor does not match the model schema.
RiskAssessment predict_trajectory(const Model& model, const ehr::Preprocessor& pre,
                                  const ehr::PatientRecord& record,
                                  const analytics::CalibrationArtifact* calibration = nullptr);

/// Same, for an already preprocessed patient.
RiskAssessment predict_trajectory(const Model& model, const ehr::PatientTensor& patient,
                                  const analytics::CalibrationArtifact* calibration = nullptr);

struct RankedFeature {
  std::string name;
  double value = 0.0;
  std::string unit;
  double importance = 0.0;
  /// True when the value was filled in rather than measured at this visit.
  bool imputed = false;

  double percent() const { return 100.0 * importance; }
  bool operator==(const RankedFeature&) const = default;
};

/// Top `top_k` channels at `visit` by descending importance; equal
/// importances keep schema order. top_k larger than the channel count is
/// clamped. Throws std::invalid_argument for top_k == 0 and
/// std::out_of_range for a missing visit.
std::vector<RankedFeature> rank_features(const RiskAssessment& assessment, std::size_t visit,
                                         std::size_t top_k);

}  // namespace aicare::model
