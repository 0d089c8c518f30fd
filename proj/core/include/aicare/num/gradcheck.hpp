#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "aicare/num/tape.hpp"

namespace aicare::num {

/// Builds a scalar loss on `tape` from leaf variables bound to the
/// parameters, in order. Must be deterministic.
using LossFn = std::function<Var(Tape& tape, std::span<const Var> params)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

/// Relative error used by the checker: |a - n| / max(|a|, |n|, floor).
/// The floor keeps coordinates whose true gradient is ~0 from dividing
/// rounding noise by itself.
inline constexpr double kGradCheckFloor = 1e-6;

/// Compares tape gradients with central differences (f(p+eps) - f(p-eps)) / 2eps
/// on every coordinate. `eps` must lie in [1e-6, 1e-4].
GradCheckResult finite_difference_check(const LossFn& loss_fn, std::span<const Tensor> params,
                                        double eps = 1e-5);

}  // namespace aicare::num
