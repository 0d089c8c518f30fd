#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "aicare/ehr/cleaning.hpp"
#include "aicare/error.hpp"
#include "test_util.hpp"

namespace aicare::ehr {
namespace {

Cohort one_patient(std::vector<Visit> visits, std::size_t n_dynamic) {
  Cohort c;
  c.schema = testing::small_schema(0, n_dynamic);
  PatientRecord p;
  p.patient_id = "p";
  p.visits = std::move(visits);
  c.patients.push_back(std::move(p));
  return c;
}

TEST(AggregateSameDay, MeanOfTwo) {
  const auto c = aggregate_same_day(one_patient({{3.1, {2.0}, true}, {3.6, {4.0}, true}}, 1));
  ASSERT_EQ(c.patients[0].visits.size(), 1u);
  EXPECT_DOUBLE_EQ(*c.patients[0].visits[0].values[0], 3.0);
  EXPECT_DOUBLE_EQ(c.patients[0].visits[0].time, 3.1);
  EXPECT_FALSE(c.patients[0].visits[0].same_day_duplicate);
}

TEST(AggregateSameDay, MissingIgnored) {
  const auto c = aggregate_same_day(one_patient({{3.1, {5.0}, true}, {3.6, {std::nullopt}, true}}, 1));
  EXPECT_DOUBLE_EQ(*c.patients[0].visits[0].values[0], 5.0);
}

TEST(AggregateSameDay, DisjointFeaturesGiveUnion) {
  const auto c = aggregate_same_day(one_patient({{7.0, {1.0, std::nullopt, std::nullopt}, true},
                                                 {7.2, {std::nullopt, 2.0, std::nullopt}, true},
                                                 {7.9, {std::nullopt, std::nullopt, 3.0}, true},
                                                 {8.0, {9.0, std::nullopt, std::nullopt}, false}},
                                                3));
  ASSERT_EQ(c.patients[0].visits.size(), 2u);
  const auto& v = c.patients[0].visits[0].values;
  EXPECT_EQ(v, (std::vector<Value>{1.0, 2.0, 3.0}));
  EXPECT_EQ(c.patients[0].visits[1].values[0], Value(9.0));
}

// Brute-force oracle: bucket every observation by day and average.
TEST(AggregateSameDay, MatchesBucketOracleOnRandomCohorts) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Visit> visits;
    double t = 0.0;
    const int n = 1 + static_cast<int>(gen() % 12);
    for (int i = 0; i < n; ++i) {
      t += 0.1 + static_cast<double>(gen() % 30) / 20.0;
      Visit v{t, {}, false};
      for (int j = 0; j < 2; ++j) {
        if (gen() % 3 == 0) {
          v.values.push_back(std::nullopt);
        } else {
          v.values.push_back(static_cast<double>(gen() % 100));
        }
      }
      visits.push_back(v);
    }
    std::map<double, std::array<std::vector<double>, 2>> buckets;
    for (const auto& v : visits) {
      auto& b = buckets[std::floor(v.time)];
      for (int j = 0; j < 2; ++j) {
        if (v.values[j]) b[j].push_back(*v.values[j]);
      }
    }
    const auto out = aggregate_same_day(one_patient(visits, 2)).patients[0].visits;
    ASSERT_EQ(out.size(), buckets.size());
    std::size_t k = 0;
    for (const auto& [day, b] : buckets) {
      EXPECT_EQ(std::floor(out[k].time), day);
      for (int j = 0; j < 2; ++j) {
        if (b[j].empty()) {
          EXPECT_FALSE(out[k].values[j].has_value());
        } else {
          double s = 0;
          for (double x : b[j]) s += x;
          EXPECT_NEAR(*out[k].values[j], s / static_cast<double>(b[j].size()), 1e-12);
        }
      }
      ++k;
    }
  }
}

Cohort ten_visits(std::size_t observed_a, std::size_t observed_b) {
  std::vector<Visit> visits;
  for (std::size_t t = 0; t < 10; ++t) {
    visits.push_back({static_cast<double>(t), {t < observed_a ? Value(1.0) : std::nullopt,
                                                t < observed_b ? Value(2.0) : std::nullopt,
                                                Value(3.0)},
                      false});
  }
  return one_patient(visits, 3);
}

TEST(PruneSparse, BoundaryIsStrict) {
  // d0: 1/10 observed, exactly 90% missing -> kept. d1: 0/10 -> removed.
  const auto r = prune_sparse_features(ten_visits(1, 0));
  EXPECT_EQ(r.removed_features, std::vector<std::string>{"d1"});
  EXPECT_EQ(r.cohort.schema.n_dynamic(), 2u);
  EXPECT_EQ(r.cohort.patients[0].visits[0].values, (std::vector<Value>{1.0, 3.0}));
}

TEST(PruneSparse, SparseRemovedDenseKept) {
  Cohort c;
  c.schema = testing::small_schema(1, 2);
  PatientRecord p;
  p.patient_id = "p";
  p.static_values = {Value(1.0)};
  for (int t = 0; t < 20; ++t) {
    p.visits.push_back({static_cast<double>(t), {t == 0 ? Value(1.0) : std::nullopt, Value(2.0)}, false});
  }
  c.patients.push_back(p);
  const auto r = prune_sparse_features(c);
  EXPECT_EQ(r.removed_features, std::vector<std::string>{"d0"});
  EXPECT_EQ(r.cohort.schema.n_static(), 1u);
}

TEST(PruneSparse, Errors) {
  EXPECT_THROW(prune_sparse_features(ten_visits(0, 0), 0.0), std::invalid_argument);
  EXPECT_THROW(prune_sparse_features(ten_visits(0, 0), 1.5), std::invalid_argument);
  auto c = one_patient({{0.0, {std::nullopt}, false}, {1.0, {std::nullopt}, false}}, 1);
  EXPECT_THROW(prune_sparse_features(c), DataError);
  EXPECT_NO_THROW(prune_sparse_features(c, 1.0));
}

}  // namespace
}  // namespace aicare::ehr
