#pragma once

#include "aicare/ehr/cohort.hpp"

namespace aicare::ehr {

/// Deceased: visit positive iff event_time - visit_time <= horizon, else negative.
/// Survivor: visits with last_followup - visit_time < horizon are excluded,
/// the rest negative. A visit after the event/follow-up time is a DataError.
LabeledCohort assign_mortality_labels(const Cohort& cohort, double horizon_days = 365.0);

/// outcome.time holds the delivery gestational day. Visits outside
/// [delivery - window, delivery] are dropped; every kept visit is positive iff
/// delivery < preterm_week weeks. Records without a delivery age, or with no
/// visit left in the window, are dropped and counted.
LabeledCohort assign_preterm_labels(const Cohort& cohort, double preterm_week = 37.0,
                                    double window_days = 300.0);

}  // namespace aicare::ehr
