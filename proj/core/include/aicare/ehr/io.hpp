#pragma once

#include <string>

#include "aicare/ehr/cohort.hpp"

namespace aicare::ehr {

/// Reads `patient_id,time,<dynamic...>` and `patient_id,<static...>,event,event_time`.
/// Empty cells are missing. Column names must match the schema exactly, in any order.
Cohort load_cohort(const std::string& visits_file, const std::string& static_file,
                   const std::string& schema_file);

/// Same as load_cohort on in-memory CSV text; `source` prefixes error messages.
Cohort parse_cohort(const std::string& visits_csv, const std::string& static_csv,
                    const FeatureSchema& schema, const std::string& source = "<memory>");

struct CohortCsv {
  std::string visits;
  std::string statics;
};

/// Serializes with shortest round-trip number formatting, so
/// parse_cohort(to_csv(c)) reproduces every value exactly.
CohortCsv to_csv(const Cohort& cohort);

void write_cohort(const Cohort& cohort, const std::string& visits_file,
                  const std::string& static_file, const std::string& schema_file);

/// Shortest decimal text that parses back to `x`.
std::string format_double(double x);

}  // namespace aicare::ehr
