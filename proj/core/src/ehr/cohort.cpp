#include "aicare/ehr/cohort.hpp"

#include <algorithm>

#include "aicare/error.hpp"

namespace aicare::ehr {

std::size_t Cohort::n_visits() const {
  std::size_t n = 0;
  for (const auto& p : patients) n += p.visits.size();
  return n;
}

void Cohort::validate() const {
  for (const auto& p : patients) {
    const std::string who = "patient '" + p.patient_id + "'";
    if (p.visits.empty()) throw DataError(who + " has no visits");
    if (p.static_values.size() != schema.n_static()) {
      throw DataError(who + " has " + std::to_string(p.static_values.size()) +
                      " static values, schema expects " + std::to_string(schema.n_static()));
    }
    for (std::size_t t = 0; t < p.visits.size(); ++t) {
      if (p.visits[t].values.size() != schema.n_dynamic()) {
        throw DataError(who + " visit " + std::to_string(t) + " has wrong width");
      }
      if (t > 0 && !(p.visits[t].time > p.visits[t - 1].time)) {
        throw DataError(who + " visit times are not strictly increasing at visit " +
                        std::to_string(t));
      }
    }
  }
}

std::size_t LabeledCohort::n_included_visits() const {
  std::size_t n = 0;
  for (const auto& p : patients) {
    n += static_cast<std::size_t>(std::count_if(p.labels.begin(), p.labels.end(), [](VisitLabel l) {
      return l != VisitLabel::Excluded;
    }));
  }
  return n;
}

std::size_t LabeledCohort::n_positive_patients() const {
  return static_cast<std::size_t>(
      std::count_if(patients.begin(), patients.end(), [](const auto& p) { return p.positive; }));
}

const LabeledPatient* LabeledCohort::find(const std::string& patient_id) const {
  for (const auto& p : patients) {
    if (p.record.patient_id == patient_id) return &p;
  }
  return nullptr;
}

}  // namespace aicare::ehr
