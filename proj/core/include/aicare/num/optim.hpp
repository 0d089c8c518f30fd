#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aicare/num/params.hpp"
#include "aicare/num/tensor.hpp"

namespace aicare::num {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

AdamState make_adam_state(const ParamSet& params, AdamConfig config = {});

/// One bias-corrected Adam step. The step counter is incremented before the
/// correction terms are formed. A non-finite gradient aborts the update
/// (nothing is modified) with an error naming the parameter.
void adam_update(ParamSet& params, std::span<const Tensor> grads, AdamState& state);

double global_norm(std::span<const Tensor> grads);

/// Rescales all gradients jointly so that their global L2 norm is at most
/// `max_norm`. Returns the norm before clipping.
double clip_gradients(std::span<Tensor> grads, double max_norm);

}  // namespace aicare::num
