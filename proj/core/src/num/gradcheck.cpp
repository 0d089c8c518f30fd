#include "aicare/num/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace aicare::num {
namespace {

double evaluate(const LossFn& fn, std::span<const Tensor> params) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (const auto& p : params) leaves.push_back(tape.constant(p));
  const Var loss = fn(tape, leaves);
  const double value = loss.value().item();
  if (!std::isfinite(value)) throw std::domain_error("loss is non-finite");
  return value;
}

}  // namespace

GradCheckResult finite_difference_check(const LossFn& loss_fn, std::span<const Tensor> params,
                                        double eps) {
  if (!(eps >= 1e-6 && eps <= 1e-4)) {
    throw std::invalid_argument("finite_difference_check: eps must lie in [1e-6, 1e-4]");
  }

  Tape tape;
  std::vector<Var> leaves;
  for (const auto& p : params) leaves.push_back(tape.leaf(p));
  const Var loss = loss_fn(tape, leaves);
  tape.backward(loss);
  std::vector<Tensor> analytic;
  for (const auto& l : leaves) analytic.push_back(tape.grad(l));

  GradCheckResult result;
  std::vector<Tensor> probe(params.begin(), params.end());
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    const Tensor original = params[pi];
    std::vector<double> data(original.data().begin(), original.data().end());
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double base = data[j];
      double plus = 0.0;
      double minus = 0.0;
      try {
        data[j] = base + eps;
        probe[pi] = Tensor(original.shape(), data);
        plus = evaluate(loss_fn, probe);
        data[j] = base - eps;
        probe[pi] = Tensor(original.shape(), data);
        minus = evaluate(loss_fn, probe);
      } catch (const std::domain_error& e) {
        throw std::domain_error("loss non-finite at perturbed point (parameter " +
                                std::to_string(pi) + ", index " + std::to_string(j) +
                                "): " + e.what());
      }
      data[j] = base;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double a = analytic[pi][j];
      const double denom = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      const double rel = std::abs(a - numeric) / denom;
      ++result.coordinates;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_param = pi;
        result.worst_index = j;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
    probe[pi] = original;
  }
  return result;
}

}  // namespace aicare::num
