#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/ehr/cohort.hpp"

namespace aicare::ehr {

struct FeatureStats {
  std::string name;
  double median = 0.0;
  double mean = 0.0;
  /// 1 when the imputed training values are constant.
  double std = 1.0;
  bool observed = false;

  bool operator==(const FeatureStats&) const = default;
};

/// Imputation and z-score statistics fitted on one training split.
struct Preprocessor {
  std::string fold_id;
  std::vector<FeatureStats> dynamic_stats;
  std::vector<FeatureStats> static_stats;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static Preprocessor from_json(const nlohmann::json& doc);
  bool operator==(const Preprocessor&) const = default;
};

/// Medians over observed training values; means and population stds over
/// the LOCF + median-imputed training values. Statics get the same treatment.
Preprocessor fit_preprocessor(const LabeledCohort& cohort, std::span<const std::size_t> train,
                              std::string fold_id);

/// Last observation carried forward; leading gaps stay missing.
std::vector<Value> locf(const std::vector<Value>& series);

/// Dense, model-ready form of one patient. Matrices are row-major [visit][feature].
struct PatientTensor {
  std::string patient_id;
  std::size_t n_visits = 0;
  std::size_t n_dynamic = 0;
  std::size_t n_static = 0;
  std::vector<double> times;
  /// log1p(days since previous visit); 0 at the first visit.
  std::vector<double> gaps;
  std::vector<double> dynamic_z;
  /// Imputed values in original units, for display.
  std::vector<double> dynamic_imputed;
  /// 1 where the value was measured, 0 where imputed.
  std::vector<std::uint8_t> dynamic_observed;
  std::vector<double> static_z;
  std::vector<double> static_imputed;
  std::vector<std::uint8_t> static_observed;
  std::vector<VisitLabel> labels;
  bool positive = false;
  /// Oversampled copy; never used for evaluation.
  bool duplicate = false;

  double z(std::size_t t, std::size_t j) const { return dynamic_z[t * n_dynamic + j]; }
  double imputed(std::size_t t, std::size_t j) const { return dynamic_imputed[t * n_dynamic + j]; }
  bool observed(std::size_t t, std::size_t j) const {
    return dynamic_observed[t * n_dynamic + j] != 0;
  }
};

PatientTensor apply_preprocessor(const PatientRecord& record, const Preprocessor& pre);
PatientTensor apply_preprocessor(const LabeledPatient& patient, const Preprocessor& pre);
std::vector<PatientTensor> apply_preprocessor(const LabeledCohort& cohort,
                                              std::span<const std::size_t> indices,
                                              const Preprocessor& pre);

struct Oversampled {
  /// Original training indices followed by drawn duplicates.
  std::vector<std::size_t> indices;
  std::vector<bool> duplicate;
};

/// Patient-level random oversampling of the minority class, with replacement,
/// until class counts are equal.
Oversampled oversample_minority(const LabeledCohort& cohort, std::span<const std::size_t> train,
                                std::uint64_t seed);

}  // namespace aicare::ehr
