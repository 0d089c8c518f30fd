#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/analytics/calibration.hpp"
#include "aicare/ehr/cohort.hpp"
#include "aicare/ehr/preprocess.hpp"
#include "aicare/model/model.hpp"

namespace aicare::analytics {

struct PopulationPoint {
  std::string patient_id;
  std::size_t visit = 0;
  /// Measured value in original units.
  double value = 0.0;
  double importance = 0.0;
  /// Calibrated when a calibration is supplied, raw otherwise.
  double risk = 0.0;

  bool operator==(const PopulationPoint&) const = default;
};

struct PopulationSummary {
  std::string feature;
  std::string unit;
  /// Patients actually sampled (the cohort size when it is smaller than requested).
  std::size_t sample_size = 0;
  std::size_t requested = 0;
  std::uint64_t seed = 0;
  /// Sampled ids, sorted.
  std::vector<std::string> patient_ids;
  /// Ordered by patient id, then visit.
  std::vector<PopulationPoint> points;
  std::vector<std::string> warnings;

  /// Columnar form: {"value": [...], "importance": [...], "risk": [...], ...}.
  nlohmann::json to_json() const;
  /// "value,importance,risk" header plus one row per point.
  std::string to_csv() const;
  bool operator==(const PopulationSummary&) const = default;
};

/// Samples `n` patients with a generator seeded by `seed` and records, for
/// every included (labeled) visit where `feature` was measured, the
/// (value, importance, risk) triple. Throws NotFoundError for an unknown
/// feature and std::invalid_argument for n == 0.
PopulationSummary population_aggregate(const model::Model& model, const ehr::Preprocessor& pre,
                                       const ehr::LabeledCohort& cohort, const std::string& feature,
                                       std::size_t n = 100, std::uint64_t seed = 42,
                                       const CalibrationArtifact* calibration = nullptr);

}  // namespace aicare::analytics
