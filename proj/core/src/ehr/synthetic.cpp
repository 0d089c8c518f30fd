#include "aicare/ehr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "aicare/num/random.hpp"

namespace aicare::ehr {

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("synthetic spec: " + what); };
  if (n_patients == 0) fail("n_patients must be positive");
  if (n_dynamic == 0) fail("n_dynamic must be positive");
  if (min_visits == 0 || max_visits < min_visits) fail("need 1 <= min_visits <= max_visits");
  if (signal_features.empty()) fail("at least one planted-signal feature is required");
  if (signal_features.size() != hazard_weights.size()) {
    fail("signal_features and hazard_weights differ in length");
  }
  for (auto j : signal_features) {
    if (j >= n_dynamic) fail("signal feature index " + std::to_string(j) + " out of range");
  }
  if (!(horizon_days > 365.0)) fail("horizon_days must exceed 365");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) fail("missing_rate must be in [0, 1)");
  if (!(min_gap_days >= 1.0 && max_gap_days >= min_gap_days)) fail("bad visit gap range");
  if (!(noise_sd >= 0.0 && slope_sd >= 0.0)) fail("standard deviations must be non-negative");
}

nlohmann::json SyntheticSpec::to_json() const {
  return {{"n_patients", n_patients},     {"n_static", n_static},
          {"n_dynamic", n_dynamic},       {"min_visits", min_visits},
          {"max_visits", max_visits},     {"signal_features", signal_features},
          {"hazard_weights", hazard_weights}, {"drift", drift},
          {"threshold", threshold},       {"horizon_days", horizon_days},
          {"slope_sd", slope_sd},         {"noise_sd", noise_sd},
          {"missing_rate", missing_rate}, {"min_gap_days", min_gap_days},
          {"max_gap_days", max_gap_days}, {"seed", seed}};
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& doc) {
  SyntheticSpec s;
  s.n_patients = doc.value("n_patients", s.n_patients);
  s.n_static = doc.value("n_static", s.n_static);
  s.n_dynamic = doc.value("n_dynamic", s.n_dynamic);
  s.min_visits = doc.value("min_visits", s.min_visits);
  s.max_visits = doc.value("max_visits", s.max_visits);
  s.signal_features = doc.value("signal_features", s.signal_features);
  s.hazard_weights = doc.value("hazard_weights", s.hazard_weights);
  s.drift = doc.value("drift", s.drift);
  s.threshold = doc.value("threshold", s.threshold);
  s.horizon_days = doc.value("horizon_days", s.horizon_days);
  s.slope_sd = doc.value("slope_sd", s.slope_sd);
  s.noise_sd = doc.value("noise_sd", s.noise_sd);
  s.missing_rate = doc.value("missing_rate", s.missing_rate);
  s.min_gap_days = doc.value("min_gap_days", s.min_gap_days);
  s.max_gap_days = doc.value("max_gap_days", s.max_gap_days);
  s.seed = doc.value("seed", s.seed);
  return s;
}

namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%02zu", prefix, i);
  return buf;
}

FeatureSchema synthetic_schema(const SyntheticSpec& spec) {
  std::vector<Feature> features;
  for (std::size_t j = 0; j < spec.n_static; ++j) {
    Feature f;
    f.kind = FeatureKind::Static;
    if (j == 0) {
      f.name = "age";
      f.unit = "years";
    } else if (j == 1) {
      f.name = "sex";
      f.categorical = true;
    } else {
      f.name = numbered("baseline", j);
    }
    f.category = "Demographics";
    features.push_back(std::move(f));
  }
  for (std::size_t j = 0; j < spec.n_dynamic; ++j) {
    features.push_back({numbered("lab", j), FeatureKind::Dynamic, "units", false, "Laboratory"});
  }
  return FeatureSchema(std::move(features));
}

}  // namespace

Cohort generate_synthetic_cohort(const SyntheticSpec& spec) {
  spec.validate();
  num::Rng rng(spec.seed);
  Cohort cohort;
  cohort.schema = synthetic_schema(spec);
  const std::size_t d = spec.n_dynamic;

  // Display units per feature: value = center + scale * latent.
  std::vector<double> center(d);
  std::vector<double> scale(d);
  for (std::size_t j = 0; j < d; ++j) {
    center[j] = rng.uniform(5.0, 100.0);
    scale[j] = center[j] * rng.uniform(0.1, 0.3);
  }

  const int width = static_cast<int>(std::to_string(spec.n_patients).size());
  for (std::size_t i = 0; i < spec.n_patients; ++i) {
    PatientRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "P%0*zu", width, i + 1);
    rec.patient_id = id;

    std::vector<double> base(d);
    std::vector<double> slope(d);
    for (std::size_t j = 0; j < d; ++j) {
      base[j] = rng.normal();
      slope[j] = rng.normal(0.0, spec.slope_sd);
    }
    // h(t) = a + b * years
    double a = 0.0;
    double b = spec.drift;
    for (std::size_t k = 0; k < spec.signal_features.size(); ++k) {
      a += spec.hazard_weights[k] * base[spec.signal_features[k]];
      b += spec.hazard_weights[k] * slope[spec.signal_features[k]];
    }
    const double early_death = rng.uniform(60.0, 365.0);
    std::optional<double> event_time;
    if (a >= spec.threshold) {
      event_time = std::round(early_death);
    } else if (b > 0.0) {
      const double t = (spec.threshold - a) / b * 365.0;
      if (t <= spec.horizon_days) event_time = std::max(1.0, std::round(t));
    }
    rec.outcome.event = event_time.has_value();
    rec.outcome.time = event_time.value_or(spec.horizon_days);

    const std::size_t target =
        spec.min_visits + rng.index(spec.max_visits - spec.min_visits + 1);
    double t = 0.0;
    while (rec.visits.size() < target && t < *rec.outcome.time) {
      Visit v;
      v.time = t;
      v.values.resize(d);
      for (std::size_t j = 0; j < d; ++j) {
        const double latent = base[j] + slope[j] * t / 365.0 + rng.normal(0.0, spec.noise_sd);
        const bool missing = rng.bernoulli(spec.missing_rate);
        if (!missing) v.values[j] = std::round((center[j] + scale[j] * latent) * 1000.0) / 1000.0;
      }
      rec.visits.push_back(std::move(v));
      t += std::round(rng.uniform(spec.min_gap_days, spec.max_gap_days));
    }

    for (std::size_t j = 0; j < spec.n_static; ++j) {
      double v = 0.0;
      if (j == 0) {
        v = std::round(std::clamp(rng.normal(60.0, 12.0), 18.0, 95.0));
      } else if (j == 1) {
        v = rng.bernoulli(0.5) ? 1.0 : 0.0;
      } else {
        v = std::round(rng.normal() * 1000.0) / 1000.0;
      }
      rec.static_values.push_back(v);
    }
    cohort.patients.push_back(std::move(rec));
  }
  cohort.validate();
  return cohort;
}

}  // namespace aicare::ehr
