#include "aicare/ehr/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "aicare/error.hpp"
#include "aicare/num/random.hpp"

namespace aicare::ehr {

namespace {

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

void finish_stats(FeatureStats& s, const std::vector<double>& imputed) {
  if (imputed.empty()) return;
  double sum = 0.0;
  for (double v : imputed) sum += v;
  s.mean = sum / static_cast<double>(imputed.size());
  double ss = 0.0;
  for (double v : imputed) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(imputed.size()));
  s.std = sd > 1e-12 ? sd : 1.0;
}

nlohmann::json stats_json(const std::vector<FeatureStats>& stats) {
  auto arr = nlohmann::json::array();
  for (const auto& s : stats) {
    arr.push_back({{"name", s.name},
                   {"median", s.median},
                   {"mean", s.mean},
                   {"std", s.std},
                   {"observed", s.observed}});
  }
  return arr;
}

std::vector<FeatureStats> stats_from_json(const nlohmann::json& arr) {
  std::vector<FeatureStats> out;
  for (const auto& item : arr) {
    out.push_back({item.at("name").get<std::string>(), item.at("median").get<double>(),
                   item.at("mean").get<double>(), item.at("std").get<double>(),
                   item.at("observed").get<bool>()});
  }
  return out;
}

}  // namespace

nlohmann::json Preprocessor::to_json() const {
  return {{"fold_id", fold_id},
          {"dynamic", stats_json(dynamic_stats)},
          {"static", stats_json(static_stats)},
          {"warnings", warnings}};
}

Preprocessor Preprocessor::from_json(const nlohmann::json& doc) {
  Preprocessor p;
  p.fold_id = doc.at("fold_id").get<std::string>();
  p.dynamic_stats = stats_from_json(doc.at("dynamic"));
  p.static_stats = stats_from_json(doc.at("static"));
  p.warnings = doc.value("warnings", std::vector<std::string>{});
  return p;
}

std::vector<Value> locf(const std::vector<Value>& series) {
  std::vector<Value> out(series.size());
  Value last;
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (series[t]) last = series[t];
    out[t] = last;
  }
  return out;
}

Preprocessor fit_preprocessor(const LabeledCohort& cohort, std::span<const std::size_t> train,
                              std::string fold_id) {
  if (train.empty()) throw DataError("fit_preprocessor: training split is empty");
  const auto& schema = cohort.schema;
  const std::size_t d = schema.n_dynamic();
  const std::size_t s = schema.n_static();
  Preprocessor pre;
  pre.fold_id = std::move(fold_id);

  std::vector<std::vector<double>> dyn_obs(d);
  std::vector<std::vector<double>> st_obs(s);
  for (auto i : train) {
    const auto& rec = cohort.patients.at(i).record;
    for (const auto& v : rec.visits) {
      for (std::size_t j = 0; j < d; ++j) {
        if (v.values[j]) dyn_obs[j].push_back(*v.values[j]);
      }
    }
    for (std::size_t j = 0; j < s; ++j) {
      if (rec.static_values[j]) st_obs[j].push_back(*rec.static_values[j]);
    }
  }

  auto init = [&](const std::vector<Feature>& features, const std::vector<std::vector<double>>& obs,
                  std::vector<FeatureStats>& out) {
    for (std::size_t j = 0; j < features.size(); ++j) {
      FeatureStats st;
      st.name = features[j].name;
      st.observed = !obs[j].empty();
      if (st.observed) {
        st.median = median_of(obs[j]);
      } else {
        pre.warnings.push_back("feature '" + st.name +
                               "' is never observed in the training split; median set to 0");
      }
      out.push_back(std::move(st));
    }
  };
  init(schema.dynamic_features(), dyn_obs, pre.dynamic_stats);
  init(schema.static_features(), st_obs, pre.static_stats);

  std::vector<std::vector<double>> dyn_imp(d);
  std::vector<std::vector<double>> st_imp(s);
  for (auto i : train) {
    const auto& rec = cohort.patients[i].record;
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<Value> series;
      series.reserve(rec.visits.size());
      for (const auto& v : rec.visits) series.push_back(v.values[j]);
      for (const auto& v : locf(series)) dyn_imp[j].push_back(v.value_or(pre.dynamic_stats[j].median));
    }
    for (std::size_t j = 0; j < s; ++j) {
      st_imp[j].push_back(rec.static_values[j].value_or(pre.static_stats[j].median));
    }
  }
  for (std::size_t j = 0; j < d; ++j) finish_stats(pre.dynamic_stats[j], dyn_imp[j]);
  for (std::size_t j = 0; j < s; ++j) finish_stats(pre.static_stats[j], st_imp[j]);
  return pre;
}

PatientTensor apply_preprocessor(const PatientRecord& record, const Preprocessor& pre) {
  const std::size_t d = pre.dynamic_stats.size();
  const std::size_t s = pre.static_stats.size();
  if (record.static_values.size() != s ||
      (!record.visits.empty() && record.visits.front().values.size() != d)) {
    throw DataError("apply_preprocessor: patient '" + record.patient_id +
                    "' does not match the fitted schema");
  }
  PatientTensor pt;
  pt.patient_id = record.patient_id;
  pt.n_visits = record.visits.size();
  pt.n_dynamic = d;
  pt.n_static = s;
  const std::size_t n = pt.n_visits;
  pt.times.resize(n);
  pt.gaps.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    pt.times[t] = record.visits[t].time;
    pt.gaps[t] = t == 0 ? 0.0 : std::log1p(std::max(0.0, pt.times[t] - pt.times[t - 1]));
  }
  pt.dynamic_z.resize(n * d);
  pt.dynamic_imputed.resize(n * d);
  pt.dynamic_observed.resize(n * d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& st = pre.dynamic_stats[j];
    Value last;
    for (std::size_t t = 0; t < n; ++t) {
      const auto& v = record.visits[t].values[j];
      if (v) last = v;
      const double x = last.value_or(st.median);
      pt.dynamic_imputed[t * d + j] = x;
      pt.dynamic_z[t * d + j] = (x - st.mean) / st.std;
      pt.dynamic_observed[t * d + j] = v ? 1 : 0;
    }
  }
  for (std::size_t j = 0; j < s; ++j) {
    const auto& st = pre.static_stats[j];
    const auto& v = record.static_values[j];
    const double x = v.value_or(st.median);
    pt.static_imputed.push_back(x);
    pt.static_z.push_back((x - st.mean) / st.std);
    pt.static_observed.push_back(v ? 1 : 0);
  }
  pt.labels.assign(n, VisitLabel::Excluded);
  return pt;
}

PatientTensor apply_preprocessor(const LabeledPatient& patient, const Preprocessor& pre) {
  auto pt = apply_preprocessor(patient.record, pre);
  pt.labels = patient.labels;
  pt.positive = patient.positive;
  return pt;
}

std::vector<PatientTensor> apply_preprocessor(const LabeledCohort& cohort,
                                              std::span<const std::size_t> indices,
                                              const Preprocessor& pre) {
  std::vector<PatientTensor> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(apply_preprocessor(cohort.patients.at(i), pre));
  return out;
}

Oversampled oversample_minority(const LabeledCohort& cohort, std::span<const std::size_t> train,
                                std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (auto i : train) (cohort.patients.at(i).positive ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    throw DataError("oversample_minority: training split contains a single class");
  }
  Oversampled out;
  out.indices.assign(train.begin(), train.end());
  out.duplicate.assign(train.size(), false);
  const auto& minority = pos.size() < neg.size() ? pos : neg;
  const std::size_t deficit = std::max(pos.size(), neg.size()) - minority.size();
  num::Rng rng(seed);
  for (std::size_t k = 0; k < deficit; ++k) {
    out.indices.push_back(minority[rng.index(minority.size())]);
    out.duplicate.push_back(true);
  }
  return out;
}

}  // namespace aicare::ehr
