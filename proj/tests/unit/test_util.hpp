#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "aicare/ehr/cohort.hpp"
#include "aicare/num/tensor.hpp"

namespace aicare::testing {

inline num::Tensor random_tensor(num::Shape shape, std::mt19937_64& gen, double lo = -1.0,
                                 double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> data(num::numel(shape));
  for (auto& x : data) x = dist(gen);
  return num::Tensor(std::move(shape), std::move(data));
}

inline std::string data_path(const std::string& name) {
  return std::string(AICARE_TEST_DATA_DIR) + "/" + name;
}

/// Schema with statics s0.. and dynamics d0.., in that order.
inline ehr::FeatureSchema small_schema(std::size_t n_static, std::size_t n_dynamic) {
  std::vector<ehr::Feature> features;
  for (std::size_t j = 0; j < n_static; ++j) {
    features.push_back({"s" + std::to_string(j), ehr::FeatureKind::Static, "u", false, ""});
  }
  for (std::size_t j = 0; j < n_dynamic; ++j) {
    features.push_back({"d" + std::to_string(j), ehr::FeatureKind::Dynamic, "u", false, ""});
  }
  return ehr::FeatureSchema(std::move(features));
}

/// Single-feature patient with the given visit times and values.
inline ehr::PatientRecord series_patient(std::string id, const std::vector<double>& times,
                                         const std::vector<ehr::Value>& values,
                                         ehr::Outcome outcome = {}) {
  ehr::PatientRecord p;
  p.patient_id = std::move(id);
  for (std::size_t t = 0; t < times.size(); ++t) p.visits.push_back({times[t], {values[t]}, false});
  p.outcome = outcome;
  return p;
}

}  // namespace aicare::testing
