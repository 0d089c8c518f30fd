#include "aicare/ehr/labeling.hpp"

#include "aicare/ehr/io.hpp"
#include "aicare/error.hpp"

namespace aicare::ehr {

LabeledCohort assign_mortality_labels(const Cohort& cohort, double horizon_days) {
  if (!(horizon_days > 0.0)) throw std::invalid_argument("mortality horizon must be positive");
  LabeledCohort out;
  out.schema = cohort.schema;
  out.warnings = cohort.warnings;
  for (const auto& p : cohort.patients) {
    if (!p.outcome.time) {
      throw DataError("patient '" + p.patient_id + "' has no event or follow-up time");
    }
    const double end = *p.outcome.time;
    LabeledPatient lp;
    lp.record = p;
    lp.positive = p.outcome.event;
    for (const auto& v : p.visits) {
      if (v.time > end) {
        throw DataError("patient '" + p.patient_id + "' has a visit at time " +
                        format_double(v.time) + " after its " +
                        (p.outcome.event ? "event" : "last follow-up") + " time " +
                        format_double(end));
      }
      const double remaining = end - v.time;
      if (p.outcome.event) {
        lp.labels.push_back(remaining <= horizon_days ? VisitLabel::Positive : VisitLabel::Negative);
      } else {
        lp.labels.push_back(remaining < horizon_days ? VisitLabel::Excluded : VisitLabel::Negative);
      }
    }
    out.patients.push_back(std::move(lp));
  }
  return out;
}

LabeledCohort assign_preterm_labels(const Cohort& cohort, double preterm_week, double window_days) {
  if (!(preterm_week > 0.0) || !(window_days > 0.0)) {
    throw std::invalid_argument("preterm labeling: week and window must be positive");
  }
  LabeledCohort out;
  out.schema = cohort.schema;
  out.warnings = cohort.warnings;
  std::size_t missing_delivery = 0;
  std::size_t empty_window = 0;
  for (const auto& p : cohort.patients) {
    if (!p.outcome.time) {
      ++missing_delivery;
      continue;
    }
    const double delivery = *p.outcome.time;
    const bool preterm = delivery < preterm_week * 7.0;
    LabeledPatient lp;
    lp.record = p;
    lp.record.visits.clear();
    lp.positive = preterm;
    for (const auto& v : p.visits) {
      const double before = delivery - v.time;
      if (before < 0.0 || before > window_days) continue;
      lp.record.visits.push_back(v);
      lp.labels.push_back(preterm ? VisitLabel::Positive : VisitLabel::Negative);
    }
    if (lp.record.visits.empty()) {
      ++empty_window;
      continue;
    }
    out.patients.push_back(std::move(lp));
  }
  out.dropped_records = missing_delivery + empty_window;
  if (missing_delivery > 0) {
    out.warnings.push_back(std::to_string(missing_delivery) +
                           " records dropped: missing delivery gestational age");
  }
  if (empty_window > 0) {
    out.warnings.push_back(std::to_string(empty_window) +
                           " records dropped: no visit within the pre-delivery window");
  }
  return out;
}

}  // namespace aicare::ehr
