#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "aicare/ehr/io.hpp"
#include "aicare/ehr/synthetic.hpp"

namespace aicare::ehr {
namespace {

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Synthetic, ShapeAndValidity) {
  SyntheticSpec spec;
  spec.n_patients = 100;
  const auto c = generate_synthetic_cohort(spec);
  EXPECT_EQ(c.patients.size(), 100u);
  EXPECT_EQ(c.schema.n_dynamic(), 6u);
  EXPECT_EQ(c.schema.n_static(), 2u);
  std::size_t missing = 0;
  std::size_t total = 0;
  for (const auto& p : c.patients) {
    EXPECT_GE(p.visits.size(), 1u);
    EXPECT_LE(p.visits.size(), spec.max_visits);
    for (const auto& v : p.visits) {
      EXPECT_LE(v.time, *p.outcome.time);
      for (const auto& x : v.values) {
        missing += x ? 0 : 1;
        ++total;
      }
    }
  }
  const double rate = static_cast<double>(missing) / static_cast<double>(total);
  EXPECT_NEAR(rate, 0.3, 0.03);
}

TEST(Synthetic, ZeroWeightsGiveNoEvents) {
  SyntheticSpec spec;
  spec.hazard_weights = {0.0, 0.0, 0.0};
  const auto c = generate_synthetic_cohort(spec);
  for (const auto& p : c.patients) EXPECT_FALSE(p.outcome.event);
}

TEST(Synthetic, OutcomeTracksPlantedFeature) {
  SyntheticSpec spec;
  spec.signal_features = {0};
  spec.hazard_weights = {5.0};
  const auto c = generate_synthetic_cohort(spec);
  std::vector<double> last;
  std::vector<double> outcome;
  for (const auto& p : c.patients) {
    std::optional<double> v;
    for (const auto& visit : p.visits) {
      if (visit.values[0]) v = visit.values[0];
    }
    if (!v) continue;
    last.push_back(*v);
    outcome.push_back(p.outcome.event ? 1.0 : 0.0);
  }
  EXPECT_GT(spearman(last, outcome), 0.5);
}

TEST(Synthetic, SameSeedSameBytes) {
  SyntheticSpec spec;
  spec.n_patients = 60;
  const auto a = to_csv(generate_synthetic_cohort(spec));
  const auto b = to_csv(generate_synthetic_cohort(spec));
  EXPECT_EQ(a.visits, b.visits);
  EXPECT_EQ(a.statics, b.statics);
  spec.seed = 7;
  EXPECT_NE(to_csv(generate_synthetic_cohort(spec)).visits, a.visits);
}

TEST(Synthetic, SpecValidation) {
  SyntheticSpec spec;
  spec.signal_features = {};
  spec.hazard_weights = {};
  EXPECT_THROW(generate_synthetic_cohort(spec), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.signal_features = {9};
  spec.hazard_weights = {1.0};
  EXPECT_THROW(generate_synthetic_cohort(spec), std::invalid_argument);
  spec = SyntheticSpec{};
  EXPECT_EQ(SyntheticSpec::from_json(spec.to_json()).to_json(), spec.to_json());
}

}  // namespace
}  // namespace aicare::ehr
