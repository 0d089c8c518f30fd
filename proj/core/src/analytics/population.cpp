#include "aicare/analytics/population.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "aicare/ehr/io.hpp"
#include "aicare/error.hpp"
#include "aicare/num/random.hpp"

namespace aicare::analytics {

nlohmann::json PopulationSummary::to_json() const {
  std::vector<double> value, importance, risk;
  std::vector<std::string> ids;
  std::vector<std::size_t> visits;
  for (const auto& p : points) {
    value.push_back(p.value);
    importance.push_back(p.importance);
    risk.push_back(p.risk);
    ids.push_back(p.patient_id);
    visits.push_back(p.visit);
  }
  return {{"feature", feature},       {"unit", unit},        {"sample_size", sample_size},
          {"requested", requested},   {"seed", seed},        {"n_points", points.size()},
          {"value", value},           {"importance", importance}, {"risk", risk},
          {"patient_id", ids},        {"visit", visits},     {"warnings", warnings}};
}

std::string PopulationSummary::to_csv() const {
  std::string out = "value,importance,risk\n";
  for (const auto& p : points) {
    out += ehr::format_double(p.value) + "," + ehr::format_double(p.importance) + "," +
           ehr::format_double(p.risk) + "\n";
  }
  return out;
}

PopulationSummary population_aggregate(const model::Model& model, const ehr::Preprocessor& pre,
                                       const ehr::LabeledCohort& cohort, const std::string& feature,
                                       std::size_t n, std::uint64_t seed,
                                       const CalibrationArtifact* calibration) {
  const auto channel = model.schema.channel_index(feature);
  if (!channel) throw NotFoundError("unknown feature: " + feature);
  if (n == 0) throw std::invalid_argument("population_aggregate: n must be positive");
  const bool is_dynamic = *channel < model.schema.n_dynamic();

  PopulationSummary s;
  s.feature = feature;
  s.unit = model.schema.channel(*channel).unit;
  s.requested = n;
  s.seed = seed;

  std::vector<std::size_t> idx(cohort.patients.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (idx.size() <= n) {
    if (idx.size() < n) {
      s.warnings.push_back("cohort has " + std::to_string(idx.size()) + " patients; using all of them");
    }
  } else {
    num::Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(n);
  }
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return cohort.patients[a].record.patient_id < cohort.patients[b].record.patient_id;
  });
  s.sample_size = idx.size();

  std::vector<ehr::PatientTensor> tensors;
  for (std::size_t i : idx) {
    tensors.push_back(ehr::apply_preprocessor(cohort.patients[i], pre));
    s.patient_ids.push_back(cohort.patients[i].record.patient_id);
  }
  const auto outputs = model::forward_many(model, tensors);
  const std::size_t C = model.schema.n_channels();
  const std::size_t j = is_dynamic ? *channel : *channel - model.schema.n_dynamic();
  for (std::size_t p = 0; p < tensors.size(); ++p) {
    const auto& pt = tensors[p];
    for (std::size_t t = 0; t < pt.n_visits; ++t) {
      if (pt.labels[t] == ehr::VisitLabel::Excluded) continue;
      const bool measured = is_dynamic ? pt.observed(t, j) : pt.static_observed[j] != 0;
      if (!measured) continue;
      const double logit = outputs[p].logits[t];
      PopulationPoint point;
      point.patient_id = pt.patient_id;
      point.visit = t;
      point.value = is_dynamic ? pt.imputed(t, j) : pt.static_imputed[j];
      point.importance = outputs[p].importance[t * C + *channel];
      point.risk = calibration ? calibrated_probability(logit, calibration->temperature) : outputs[p].risks[t];
      s.points.push_back(std::move(point));
    }
  }
  return s;
}

}  // namespace aicare::analytics
