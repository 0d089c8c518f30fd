#include "aicare/model/assessment.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "aicare/error.hpp"

namespace aicare::model {

std::span<const double> RiskAssessment::importance_at(std::size_t visit) const {
  return std::span<const double>(importance).subspan(visit * n_channels(), n_channels());
}

std::span<const double> RiskAssessment::values_at(std::size_t visit) const {
  return std::span<const double>(values).subspan(visit * n_channels(), n_channels());
}

nlohmann::json RiskAssessment::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"patient_id", patient_id},
          {"channel_names", channel_names},
          {"channel_units", channel_units},
          {"times", times},
          {"logits", logits},
          {"raw_risks", raw_risks},
          {"calibrated_risks", calibrated_risks},
          {"importance", importance},
          {"values", values},
          {"z_scores", z_scores},
          {"observed", observed},
          {"temperature", opt(temperature)},
          {"threshold", opt(threshold)}};
}

RiskAssessment predict_trajectory(const Model& model, const ehr::Preprocessor& pre,
                                  const ehr::PatientRecord& record,
                                  const analytics::CalibrationArtifact* calibration) {
  const auto& schema = model.schema;
  if (record.static_values.size() != schema.n_static()) {
    throw DataError("patient " + record.patient_id + " has " + std::to_string(record.static_values.size()) +
                    " static values; the model expects " + std::to_string(schema.n_static()));
  }
  for (const auto& v : record.visits) {
    if (v.values.size() != schema.n_dynamic()) {
      throw DataError("patient " + record.patient_id + " has a visit with " + std::to_string(v.values.size()) +
                      " dynamic values; the model expects " + std::to_string(schema.n_dynamic()));
    }
  }
  if (pre.dynamic_stats.size() != schema.n_dynamic() || pre.static_stats.size() != schema.n_static()) {
    throw DataError("preprocessor does not match the model schema");
  }
  return predict_trajectory(model, ehr::apply_preprocessor(record, pre), calibration);
}

RiskAssessment predict_trajectory(const Model& model, const ehr::PatientTensor& patient,
                                  const analytics::CalibrationArtifact* calibration) {
  const auto& schema = model.schema;
  if (patient.n_dynamic != schema.n_dynamic() || patient.n_static != schema.n_static()) {
    throw DataError("patient " + patient.patient_id + " does not match the model schema");
  }
  const auto out = forward(model, patient);
  const std::size_t C = schema.n_channels();
  const std::size_t D = schema.n_dynamic();
  const std::size_t S = schema.n_static();

  RiskAssessment a;
  a.patient_id = patient.patient_id;
  for (std::size_t c = 0; c < C; ++c) {
    a.channel_names.push_back(schema.channel(c).name);
    a.channel_units.push_back(schema.channel(c).unit);
  }
  a.times = patient.times;
  a.logits = out.logits;
  a.raw_risks = out.risks;
  a.importance = out.importance;
  if (calibration) {
    a.temperature = calibration->temperature;
    a.threshold = calibration->threshold;
    for (double x : a.logits) a.calibrated_risks.push_back(analytics::calibrated_probability(x, calibration->temperature));
  } else {
    a.calibrated_risks = a.raw_risks;
  }
  for (std::size_t t = 0; t < patient.n_visits; ++t) {
    for (std::size_t j = 0; j < D; ++j) {
      a.values.push_back(patient.imputed(t, j));
      a.z_scores.push_back(patient.z(t, j));
      a.observed.push_back(patient.observed(t, j) ? 1 : 0);
    }
    for (std::size_t j = 0; j < S; ++j) {
      a.values.push_back(patient.static_imputed[j]);
      a.z_scores.push_back(patient.static_z[j]);
      a.observed.push_back(patient.static_observed[j]);
    }
  }
  return a;
}

std::vector<RankedFeature> rank_features(const RiskAssessment& assessment, std::size_t visit,
                                         std::size_t top_k) {
  if (top_k == 0) throw std::invalid_argument("rank_features: top_k must be positive");
  if (visit >= assessment.n_visits()) {
    throw std::out_of_range("rank_features: visit " + std::to_string(visit) + " out of range (" +
                            std::to_string(assessment.n_visits()) + " visits)");
  }
  const std::size_t C = assessment.n_channels();
  const auto imp = assessment.importance_at(visit);
  std::vector<std::size_t> order(C);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return imp[a] > imp[b]; });
  order.resize(std::min(top_k, C));

  std::vector<RankedFeature> out;
  for (std::size_t c : order) {
    const std::size_t k = visit * C + c;
    out.push_back({assessment.channel_names[c], assessment.values[k], assessment.channel_units[c], imp[c],
                   assessment.observed[k] == 0});
  }
  return out;
}

}  // namespace aicare::model
