#include "aicare/num/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aicare::num {

AdamState make_adam_state(const ParamSet& params, AdamConfig config) {
  if (!(config.lr > 0.0) || config.beta1 < 0.0 || config.beta1 >= 1.0 || config.beta2 < 0.0 ||
      config.beta2 >= 1.0 || !(config.eps > 0.0)) {
    throw std::invalid_argument("invalid Adam hyperparameters");
  }
  AdamState state;
  state.config = config;
  for (const auto& e : params.entries()) {
    state.first_moment.push_back(Tensor::zeros(e.value.shape()));
    state.second_moment.push_back(Tensor::zeros(e.value.shape()));
  }
  return state;
}

void adam_update(ParamSet& params, std::span<const Tensor> grads, AdamState& state) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw std::invalid_argument("adam_update: parameter/gradient/state count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].shape() != params[i].shape()) {
      throw std::invalid_argument("adam_update: gradient shape mismatch for '" + params.name(i) +
                                  "'");
    }
    // Tensor construction already rejects non-finite entries; this guards
    // gradients assembled elsewhere.
    for (double g : grads[i].data()) {
      if (!std::isfinite(g)) {
        throw std::domain_error("non-finite gradient for parameter '" + params.name(i) + "'");
      }
    }
  }

  const auto& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto p = params[i].data();
    const auto g = grads[i].data();
    const auto m_old = state.first_moment[i].data();
    const auto v_old = state.second_moment[i].data();
    std::vector<double> m(p.size()), v(p.size()), next(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m_old[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v_old[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      next[j] = p[j] - c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
    const Shape& shape = params[i].shape();
    state.first_moment[i] = Tensor(shape, std::move(m));
    state.second_moment[i] = Tensor(shape, std::move(v));
    params.set(i, Tensor(shape, std::move(next)));
  }
}

double global_norm(std::span<const Tensor> grads) {
  double sq = 0.0;
  for (const auto& g : grads) {
    for (double x : g.data()) sq += x * x;
  }
  return std::sqrt(sq);
}

double clip_gradients(std::span<Tensor> grads, double max_norm) {
  if (!(max_norm > 0.0)) {
    throw std::invalid_argument("clip_gradients: max_norm must be positive, got " +
                                std::to_string(max_norm));
  }
  const double norm = global_norm(grads);
  if (norm <= max_norm) return norm;
  const double factor = max_norm / norm;
  for (auto& g : grads) {
    std::vector<double> scaled(g.data().begin(), g.data().end());
    for (double& x : scaled) x *= factor;
    g = Tensor(g.shape(), std::move(scaled));
  }
  return norm;
}

}  // namespace aicare::num
