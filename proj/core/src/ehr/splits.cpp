#include "aicare/ehr/splits.hpp"

#include <algorithm>

#include "aicare/error.hpp"
#include "aicare/num/random.hpp"

namespace aicare::ehr {

std::vector<std::vector<std::size_t>> stratified_parts(const LabeledCohort& cohort, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k-fold split needs k >= 2");
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < cohort.patients.size(); ++i) {
    (cohort.patients[i].positive ? pos : neg).push_back(i);
  }
  if (pos.size() < k || neg.size() < k) {
    throw DataError("stratified split: need at least " + std::to_string(k) +
                    " patients per class, have " + std::to_string(pos.size()) + " positive and " +
                    std::to_string(neg.size()) + " negative");
  }
  num::Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::vector<std::size_t>> parts(k);
  std::size_t slot = 0;
  for (auto i : pos) parts[slot++ % k].push_back(i);
  for (auto i : neg) parts[slot++ % k].push_back(i);
  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

std::vector<Fold> split_stratified_kfold(const LabeledCohort& cohort, std::size_t k,
                                         std::uint64_t seed) {
  const auto parts = stratified_parts(cohort, k, seed);
  std::vector<Fold> folds;
  for (std::size_t i = 0; i < k; ++i) {
    Fold f;
    f.index = i;
    f.test = parts[i];
    const std::size_t val = (i + 1) % k;
    if (k > 2) f.validation = parts[val];
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i || (k > 2 && j == val)) continue;
      f.train.insert(f.train.end(), parts[j].begin(), parts[j].end());
    }
    std::sort(f.train.begin(), f.train.end());
    folds.push_back(std::move(f));
  }
  return folds;
}

}  // namespace aicare::ehr
