#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/ehr/cohort.hpp"

namespace aicare::ehr {

/// Planted-hazard cohort. Every dynamic feature j follows a latent line
/// f_j(t) = b_j + s_j * t / 365 with b_j ~ N(0,1), s_j ~ N(0, slope_sd).
/// The hazard h(t) = sum_k w_k f_{signal_k}(t) + drift * t / 365 triggers an
/// event at its first crossing of `threshold` within `horizon_days`; a patient
/// already above threshold at t = 0 dies uniformly in [60, 365] days.
/// Survivors are followed up to the horizon.
struct SyntheticSpec {
  std::size_t n_patients = 500;
  std::size_t n_static = 2;
  std::size_t n_dynamic = 6;
  std::size_t min_visits = 3;
  std::size_t max_visits = 12;
  std::vector<std::size_t> signal_features{0, 1, 2};
  std::vector<double> hazard_weights{1.0, 1.0, 1.0};
  double drift = 0.0;
  double threshold = 3.0;
  double horizon_days = 1825.0;
  double slope_sd = 0.6;
  double noise_sd = 0.2;
  double missing_rate = 0.3;
  double min_gap_days = 20.0;
  double max_gap_days = 250.0;
  std::uint64_t seed = 42;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& doc);
};

Cohort generate_synthetic_cohort(const SyntheticSpec& spec);

}  // namespace aicare::ehr
