#pragma once

#include <string>
#include <vector>

#include "aicare/ehr/cohort.hpp"

namespace aicare::ehr {

/// Merges visits falling on the same calendar day (same floor(time)) into one
/// visit at the earliest time. Each feature becomes the mean of its observed
/// values that day; a feature with no observation stays missing.
Cohort aggregate_same_day(const Cohort& cohort);

struct PruneResult {
  Cohort cohort;
  std::vector<std::string> removed_features;
};

/// Drops dynamic features whose missing fraction over all visits is strictly
/// greater than `max_missing_rate`. Rate must be in (0, 1].
PruneResult prune_sparse_features(const Cohort& cohort, double max_missing_rate = 0.9);

}  // namespace aicare::ehr
