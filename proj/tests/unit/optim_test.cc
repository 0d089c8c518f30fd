#include "aicare/num/optim.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace aicare::num {
namespace {

using aicare::testing::random_tensor;

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParamSet params;
  params.add("w", Tensor::vector({0.5, -1.5, 2.0}));
  auto state = make_adam_state(params);
  const std::vector<Tensor> grads{Tensor::zeros({3})};
  for (int i = 0; i < 3; ++i) adam_update(params, grads, state);
  EXPECT_EQ(params.at("w"), Tensor::vector({0.5, -1.5, 2.0}));
  EXPECT_EQ(state.step, 3);
}

TEST(Adam, FirstStepMatchesHandRolledOracle) {
  ParamSet params;
  params.add("p", Tensor::scalar(0.25));
  auto state = make_adam_state(params, {.lr = 0.001});
  adam_update(params, std::vector<Tensor>{Tensor::scalar(1.0)}, state);
  // m = 0.1, v = 0.001; bias-corrected m_hat = 1, v_hat = 1.
  const double m_hat = (0.1 * 1.0) / (1.0 - 0.9);
  const double v_hat = (0.001 * 1.0) / (1.0 - 0.999);
  const double expected = 0.25 - 0.001 * m_hat / (std::sqrt(v_hat) + 1e-8);
  EXPECT_NEAR(params[0].item(), expected, 1e-15);
  EXPECT_NEAR(params[0].item() - 0.25, -0.001, 1e-10);
}

TEST(Adam, IdenticalParametersMoveIdentically) {
  ParamSet params;
  params.add("a", Tensor::vector({1.0, 2.0}));
  params.add("b", Tensor::vector({1.0, 2.0}));
  auto state = make_adam_state(params);
  const std::vector<Tensor> grads{Tensor::vector({0.3, -0.7}), Tensor::vector({0.3, -0.7})};
  for (int i = 0; i < 5; ++i) adam_update(params, grads, state);
  EXPECT_EQ(params[0], params[1]);
}

TEST(Adam, DeterministicBitForBit) {
  std::mt19937_64 gen(1);
  ParamSet a;
  a.add("w", random_tensor({4, 4}, gen));
  ParamSet b = a;
  auto sa = make_adam_state(a);
  auto sb = make_adam_state(b);
  for (int i = 0; i < 10; ++i) {
    const std::vector<Tensor> g{random_tensor({4, 4}, gen)};
    adam_update(a, g, sa);
    adam_update(b, g, sb);
  }
  EXPECT_EQ(a, b);
}

TEST(Adam, ShapeMismatchIsRejected) {
  ParamSet params;
  params.add("w", Tensor::zeros({2}));
  auto state = make_adam_state(params);
  EXPECT_THROW(adam_update(params, std::vector<Tensor>{Tensor::zeros({3})}, state),
               std::invalid_argument);
}

TEST(ClipGradients, UnderThresholdIsIdentity) {
  std::vector<Tensor> g{Tensor::vector({0.3, 0.4})};
  const double norm = clip_gradients(g, 1.0);
  EXPECT_DOUBLE_EQ(norm, 0.5);
  EXPECT_EQ(g[0], Tensor::vector({0.3, 0.4}));
}

TEST(ClipGradients, ThreeFourFive) {
  std::vector<Tensor> g{Tensor::vector({3.0, 4.0})};
  clip_gradients(g, 1.0);
  EXPECT_NEAR(g[0][0], 0.6, 1e-15);
  EXPECT_NEAR(g[0][1], 0.8, 1e-15);
}

TEST(ClipGradients, NonPositiveMaxNormIsAnError) {
  std::vector<Tensor> g{Tensor::vector({1.0})};
  EXPECT_THROW(clip_gradients(g, 0.0), std::invalid_argument);
  EXPECT_THROW(clip_gradients(g, -1.0), std::invalid_argument);
}

TEST(ClipGradients, GlobalNormAndDirectionProperty) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Tensor> g{random_tensor({3, 2}, gen, -5, 5), random_tensor({4}, gen, -5, 5),
                          random_tensor({1}, gen, -5, 5)};
    const auto before = g;
    const double norm_before = global_norm(g);
    std::vector<Tensor> again = g;
    clip_gradients(g, 1.0);
    clip_gradients(again, 1.0);
    EXPECT_EQ(g, again);
    const double norm_after = global_norm(g);
    EXPECT_LE(norm_after, norm_before + 1e-15);
    if (norm_before > 1.0) {
      EXPECT_NEAR(norm_after, 1.0, 1e-12);
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g[i].size(); ++j) dot += g[i][j] * before[i][j];
    }
    EXPECT_NEAR(dot / (norm_after * norm_before), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace aicare::num
