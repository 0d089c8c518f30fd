#include "aicare/ehr/cleaning.hpp"

#include <cmath>

#include "aicare/error.hpp"

namespace aicare::ehr {

Cohort aggregate_same_day(const Cohort& cohort) {
  Cohort out;
  out.schema = cohort.schema;
  out.warnings = cohort.warnings;
  const std::size_t d = cohort.schema.n_dynamic();
  for (const auto& p : cohort.patients) {
    PatientRecord rec = p;
    rec.visits.clear();
    std::size_t t = 0;
    while (t < p.visits.size()) {
      const double day = std::floor(p.visits[t].time);
      std::vector<double> sum(d, 0.0);
      std::vector<std::size_t> count(d, 0);
      std::size_t u = t;
      for (; u < p.visits.size() && std::floor(p.visits[u].time) == day; ++u) {
        for (std::size_t j = 0; j < d; ++j) {
          if (const auto& v = p.visits[u].values[j]) {
            sum[j] += *v;
            ++count[j];
          }
        }
      }
      Visit merged;
      merged.time = p.visits[t].time;
      merged.values.resize(d);
      for (std::size_t j = 0; j < d; ++j) {
        if (count[j] > 0) merged.values[j] = sum[j] / static_cast<double>(count[j]);
      }
      rec.visits.push_back(std::move(merged));
      t = u;
    }
    out.patients.push_back(std::move(rec));
  }
  return out;
}

PruneResult prune_sparse_features(const Cohort& cohort, double max_missing_rate) {
  if (!(max_missing_rate > 0.0 && max_missing_rate <= 1.0)) {
    throw std::invalid_argument("prune_sparse_features: rate must be in (0, 1]");
  }
  const std::size_t d = cohort.schema.n_dynamic();
  const std::size_t total = cohort.n_visits();
  std::vector<std::size_t> missing(d, 0);
  for (const auto& p : cohort.patients) {
    for (const auto& v : p.visits) {
      for (std::size_t j = 0; j < d; ++j) missing[j] += v.values[j] ? 0 : 1;
    }
  }
  std::vector<std::string> removed;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < d; ++j) {
    const bool too_sparse =
        total > 0 && static_cast<double>(missing[j]) > max_missing_rate * static_cast<double>(total);
    if (too_sparse) {
      removed.push_back(cohort.schema.dynamic_features()[j].name);
    } else {
      keep.push_back(j);
    }
  }
  if (keep.empty()) throw DataError("prune_sparse_features: every dynamic feature would be removed");

  PruneResult result;
  result.removed_features = removed;
  result.cohort.schema = cohort.schema.without(removed);
  result.cohort.warnings = cohort.warnings;
  for (const auto& p : cohort.patients) {
    PatientRecord rec = p;
    for (auto& v : rec.visits) {
      std::vector<Value> kept;
      kept.reserve(keep.size());
      for (auto j : keep) kept.push_back(v.values[j]);
      v.values = std::move(kept);
    }
    result.cohort.patients.push_back(std::move(rec));
  }
  return result;
}

}  // namespace aicare::ehr
