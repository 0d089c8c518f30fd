#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aicare/ehr/cohort.hpp"

namespace aicare::ehr {

/// Patient indices into a LabeledCohort, each list ascending.
struct Fold {
  std::size_t index = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;

  bool operator==(const Fold&) const = default;
};

/// Stratified partition of patient indices into k parts. Each class is
/// shuffled with `seed` and dealt round-robin, negatives continuing where the
/// positives stopped, so part sizes differ by at most one and each part's
/// positive count is within one of positives/k.
std::vector<std::vector<std::size_t>> stratified_parts(const LabeledCohort& cohort, std::size_t k,
                                                       std::uint64_t seed);

/// Fold i: test = part i, validation = part (i+1) mod k, train = the rest.
/// With k = 2 there is no room for validation and it is left empty.
/// Requires k >= 2 and at least k patients in each class.
std::vector<Fold> split_stratified_kfold(const LabeledCohort& cohort, std::size_t k = 10,
                                         std::uint64_t seed = 42);

}  // namespace aicare::ehr
