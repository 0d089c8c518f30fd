#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aicare/ehr/schema.hpp"

namespace aicare::ehr {

using Value = std::optional<double>;

struct Visit {
  /// Days since first visit, or gestational day for obstetric cohorts.
  double time = 0.0;
  /// Aligned to schema.dynamic_features(); nullopt = not measured.
  std::vector<Value> values;
  /// Another visit of the same patient falls on the same calendar day.
  bool same_day_duplicate = false;

  bool operator==(const Visit&) const = default;
};

struct Outcome {
  bool event = false;
  /// Event time if `event`, else last follow-up time. Obstetric cohorts store
  /// the delivery gestational day here.
  std::optional<double> time;

  bool operator==(const Outcome&) const = default;
};

/// Visits are strictly increasing in time; value vectors match the schema.
struct PatientRecord {
  std::string patient_id;
  std::vector<Value> static_values;
  std::vector<Visit> visits;
  Outcome outcome;

  bool operator==(const PatientRecord&) const = default;
};

struct Cohort {
  FeatureSchema schema;
  std::vector<PatientRecord> patients;
  std::vector<std::string> warnings;

  std::size_t n_visits() const;
  /// Throws DataError on any shape or ordering violation.
  void validate() const;
};

enum class VisitLabel : std::uint8_t { Excluded, Negative, Positive };

struct LabeledPatient {
  PatientRecord record;
  /// One entry per visit.
  std::vector<VisitLabel> labels;
  /// Patient-level outcome, used as the stratum for splitting and oversampling.
  bool positive = false;

  bool operator==(const LabeledPatient&) const = default;
};

struct LabeledCohort {
  FeatureSchema schema;
  std::vector<LabeledPatient> patients;
  std::vector<std::string> warnings;
  /// Records removed during labeling (e.g. missing delivery age).
  std::size_t dropped_records = 0;

  std::size_t n_included_visits() const;
  std::size_t n_positive_patients() const;
  const LabeledPatient* find(const std::string& patient_id) const;
};

}  // namespace aicare::ehr
