#include "aicare/num/tensor.hpp"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"

namespace aicare::num {
namespace {

TEST(Tensor, ShapeAndDataMustAgree) {
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
  const Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.at({1, 2}), 6.0);
  EXPECT_EQ(t.dim(0), 2u);
}

TEST(Tensor, RejectsNonFiniteEntries) {
  EXPECT_THROW(Tensor::vector({1.0, std::numeric_limits<double>::quiet_NaN()}),
               std::domain_error);
  EXPECT_THROW(Tensor::scalar(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST(Tensor, ItemOnlyForSingletons) {
  EXPECT_EQ(Tensor::scalar(3.5).item(), 3.5);
  EXPECT_THROW(Tensor::zeros({2}).item(), std::invalid_argument);
}

TEST(Tensor, ReshapeKeepsData) {
  const Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor r = t.reshaped({3, 2});
  EXPECT_EQ(r.at({2, 1}), 6.0);
  EXPECT_THROW(t.reshaped({4}), std::invalid_argument);
}

}  // namespace
}  // namespace aicare::num
