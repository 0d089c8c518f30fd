#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aicare/model/assessment.hpp"

namespace aicare::advisory {

/// Task definitions for the two supported prediction tasks.
std::string mortality_task_definition();
std::string preterm_task_definition();

struct PromptPair {
  std::string system_text;
  std::string user_text;
  std::string task_definition;
  /// Calibrated risk in percent, as printed (one decimal).
  std::string risk_percent;
  std::vector<model::RankedFeature> top_features;
  std::vector<std::string> warnings;
};

/// Fills the advisory prompt for one visit: task definition, calibrated risk,
/// the top_k (feature, weight) lines and every channel's value at the visit.
/// top_k above the channel count is clamped with a warning; top_k == 0 and a
/// missing visit throw.
PromptPair build_prompt(const std::string& task_definition, const model::RiskAssessment& assessment,
                        std::size_t visit, std::size_t top_k = 10);

/// "87.3" for 0.873.
std::string format_percent(double probability);

}  // namespace aicare::advisory
